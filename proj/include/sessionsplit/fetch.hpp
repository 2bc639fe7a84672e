#pragma once

#include <string>

#include "sessionsplit/dates.hpp"

namespace sessionsplit {

// Endpoint template placeholders:
//   {symbol}  url-encoded instrument symbol
//   {start}   epoch seconds of the range start (00:00 UTC, inclusive)
//   {end}     epoch seconds one day past the range end (exclusive bound)
//   {events}  which document: "history", "div", or "split"
struct FetchOptions {
    std::string endpointTemplate;
    bool offline = false;
    double timeoutSeconds = 30.0;
};

// The three raw documents exactly as served, plus when we got them.
struct FetchResult {
    std::string prices;
    std::string dividends;
    std::string splits;
    std::string retrievedAtUtc;  // ISO-8601, for provenance
};

// Downloads prices, dividends, and splits for one instrument. Documents pass
// through byte-for-byte; parsing is the caller's business. Throws FetchError
// (offline mode, bad template, non-success status), TimeoutError when the
// configured budget is exceeded.
FetchResult fetch_history(const std::string& instrumentId, const DateRange& range,
                          const FetchOptions& options);

std::string url_encode(const std::string& text);

// Fills {symbol}/{start}/{end}/{events} in the template.
std::string expand_endpoint_template(const std::string& endpointTemplate,
                                     const std::string& instrumentId, const DateRange& range,
                                     const std::string& events);

}  // namespace sessionsplit
