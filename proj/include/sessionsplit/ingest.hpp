#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sessionsplit/prices.hpp"

namespace sessionsplit {

// Rows dropped by the price parser, with the reason. A skipped row is never
// silent: callers decide whether the tally is acceptable.
struct SkippedRow {
    std::size_t line = 0;
    std::string reason;
};

struct PriceParseResult {
    PriceSeries series;  // bars only; instrumentId/currency left for the caller
    std::vector<SkippedRow> skipped;

    std::size_t warningCount() const { return skipped.size(); }
};

// Parses the canonical daily-bar CSV:
//   Date,Open,High,Low,Close,Adj Close,Volume
// Dates are YYYY-MM-DD, decimal separator '.', `null` (or empty) for missing.
// Rows whose Open or Close is null/empty/non-positive are skipped and
// reported; bars come back sorted by date. `Adj Close` is accepted but
// ignored: dividends are handled explicitly through the events stream.
//
// Throws FormatError (bad header), RowError (unparseable date or number on a
// row that was not skipped), EmptySeriesError (no usable rows).
PriceParseResult parse_price_csv(std::string_view text);

// Parses the two event CSVs and merges them into one per-date stream.
//   dividends: Date,Dividends          (cash amount per share)
//   splits:    Date,Stock Splits       (ratio A:B, factor = A/B)
// A date present in both files yields a single event with both fields set.
// Header-only documents are fine (no events). Throws RowError on a bad ratio
// or amount, DuplicateEventError when a date repeats within one file.
std::vector<CorporateEvent> parse_events_csv(std::string_view dividendsText,
                                             std::string_view splitsText);

struct Violation {
    Date date;
    std::string rule;
    std::string detail;
};

// Checks every PriceSeries/DailyBar/CorporateEvent invariant. Violations are
// data, not errors: an empty report means the series is well formed.
std::vector<Violation> validate_series(const PriceSeries& series);

// Divides prices (and dividends) dated strictly before each split by the
// product of all later split factors, then normalizes every splitFactor to 1.
// Idempotent; a no-split series comes back unchanged. Use only on feeds that
// are not already split-adjusted.
PriceSeries back_adjust_splits(const PriceSeries& series);

// Inverse of parse_price_csv for round-tripping: canonical header, shortest
// round-trip number formatting, `null` for missing fields. The Adj Close
// column is filled with the close.
std::string serialize_price_csv(const PriceSeries& series);

// Event-stream serializers matching parse_events_csv's two input documents.
std::string serialize_dividends_csv(const std::vector<CorporateEvent>& events);
std::string serialize_splits_csv(const std::vector<CorporateEvent>& events);

// Keeps bars inside [range.start, range.end] and drops events dated after the
// last remaining bar.
PriceSeries clip_to_range(const PriceSeries& series, const DateRange& range);

}  // namespace sessionsplit
