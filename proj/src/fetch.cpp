#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "sessionsplit/fetch.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "sessionsplit/errors.hpp"

namespace sessionsplit {

namespace {

bool unreserved(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '_' || c == '.' || c == '~';
}

void replace_all(std::string& text, const std::string& token, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
}

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // path + query
};

SplitUrl split_url(const std::string& url) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        throw FetchError(0, "endpoint '" + url + "' has no scheme");
    std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

std::string now_utc_iso() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string get_document(const std::string& url, double timeoutSeconds) {
    SplitUrl parts = split_url(url);
    httplib::Client client(parts.base);
    client.set_follow_location(true);
    auto budget = std::chrono::duration<double>(timeoutSeconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(budget));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(budget));

    auto start = std::chrono::steady_clock::now();
    httplib::Result res = client.Get(parts.path);
    if (!res) {
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();
        if (res.error() == httplib::Error::ConnectionTimeout ||
            ((res.error() == httplib::Error::Read || res.error() == httplib::Error::Write) &&
             elapsed >= timeoutSeconds * 0.9))
            throw TimeoutError("fetch exceeded " + std::to_string(timeoutSeconds) + "s budget: " +
                               url);
        throw FetchError(0, "transport failure (" + httplib::to_string(res.error()) + "): " + url);
    }
    if (res->status < 200 || res->status >= 300)
        throw FetchError(res->status,
                         "status " + std::to_string(res->status) + " fetching " + url);
    return res->body;
}

}  // namespace

std::string url_encode(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (unreserved(c)) {
            out.push_back(c);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "%%%02X", static_cast<unsigned char>(c));
            out += buf;
        }
    }
    return out;
}

std::string expand_endpoint_template(const std::string& endpointTemplate,
                                     const std::string& instrumentId, const DateRange& range,
                                     const std::string& events) {
    std::string url = endpointTemplate;
    replace_all(url, "{symbol}", url_encode(instrumentId));
    replace_all(url, "{start}", std::to_string(range.start.epochSeconds()));
    // Exclusive upper bound: one day past the inclusive range end.
    replace_all(url, "{end}", std::to_string(range.end.plusDays(1).epochSeconds()));
    replace_all(url, "{events}", events);
    return url;
}

FetchResult fetch_history(const std::string& instrumentId, const DateRange& range,
                          const FetchOptions& options) {
    if (options.offline)
        throw FetchError(0, "offline mode: refusing to fetch " + instrumentId);
    if (options.endpointTemplate.empty())
        throw FetchError(0, "no endpoint template configured");
    if (range.end < range.start)
        throw DomainError("date range end precedes start");

    FetchResult result;
    result.prices = get_document(
        expand_endpoint_template(options.endpointTemplate, instrumentId, range, "history"),
        options.timeoutSeconds);
    result.dividends = get_document(
        expand_endpoint_template(options.endpointTemplate, instrumentId, range, "div"),
        options.timeoutSeconds);
    result.splits = get_document(
        expand_endpoint_template(options.endpointTemplate, instrumentId, range, "split"),
        options.timeoutSeconds);
    result.retrievedAtUtc = now_utc_iso();
    return result;
}

}  // namespace sessionsplit
