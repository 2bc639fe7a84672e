#include "sessionsplit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "sessionsplit/errors.hpp"

namespace sessionsplit {

namespace {

constexpr std::string_view kPriceHeader = "Date,Open,High,Low,Close,Adj Close,Volume";
constexpr std::string_view kDividendHeader = "Date,Dividends";
constexpr std::string_view kSplitHeader = "Date,Stock Splits";

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

// Iterates lines of a document without copying. Yields stripped lines plus
// their 1-based line number.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        ++lineNo;
        fn(strip_cr(line), lineNo);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

bool is_missing(std::string_view field) { return field.empty() || field == "null"; }

double parse_number(std::string_view field, std::size_t line, const char* what) {
    double v{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
        throw RowError(line, std::string("unparseable ") + what + " '" + std::string(field) + "'");
    return v;
}

std::uint64_t parse_count(std::string_view field, std::size_t line, const char* what) {
    std::uint64_t v{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw RowError(line, std::string("unparseable ") + what + " '" + std::string(field) + "'");
    return v;
}

Date parse_date_field(std::string_view field, std::size_t line) {
    auto d = Date::tryParse(field);
    if (!d) throw RowError(line, "unparseable date '" + std::string(field) + "'");
    return *d;
}

void append_number(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

}  // namespace

PriceParseResult parse_price_csv(std::string_view text) {
    PriceParseResult result;
    bool sawHeader = false;
    std::size_t dataRows = 0;
    for_each_line(text, [&](std::string_view line, std::size_t lineNo) {
        if (lineNo == 1) {
            if (line != kPriceHeader)
                throw FormatError("bad price header '" + std::string(line) + "', expected '" +
                                  std::string(kPriceHeader) + "'");
            sawHeader = true;
            return;
        }
        if (line.empty()) return;
        ++dataRows;
        auto fields = split_fields(line);
        if (fields.size() != 7)
            throw RowError(lineNo,
                           "expected 7 fields, got " + std::to_string(fields.size()));

        // Skip rule comes before any parsing: a row without both prices is
        // reported, not fatal.
        if (is_missing(fields[1])) {
            result.skipped.push_back({lineNo, "missing open"});
            return;
        }
        if (is_missing(fields[4])) {
            result.skipped.push_back({lineNo, "missing close"});
            return;
        }

        DailyBar bar;
        bar.date = parse_date_field(fields[0], lineNo);
        bar.open = parse_number(fields[1], lineNo, "open");
        bar.close = parse_number(fields[4], lineNo, "close");
        if (bar.open <= 0.0) {
            result.skipped.push_back({lineNo, "non-positive open"});
            return;
        }
        if (bar.close <= 0.0) {
            result.skipped.push_back({lineNo, "non-positive close"});
            return;
        }
        if (!is_missing(fields[2])) bar.high = parse_number(fields[2], lineNo, "high");
        if (!is_missing(fields[3])) bar.low = parse_number(fields[3], lineNo, "low");
        if (!is_missing(fields[5])) parse_number(fields[5], lineNo, "adj close");  // ignored
        if (!is_missing(fields[6])) bar.volume = parse_count(fields[6], lineNo, "volume");
        result.series.bars.push_back(bar);
    });
    if (!sawHeader) throw FormatError("empty document, expected price CSV");
    // No rows at all is an error; rows that were all skipped come back as an
    // empty series with the warnings telling the story.
    if (dataRows == 0) throw EmptySeriesError("no price rows");
    std::stable_sort(result.series.bars.begin(), result.series.bars.end(),
                     [](const DailyBar& a, const DailyBar& b) { return a.date < b.date; });
    return result;
}

std::vector<CorporateEvent> parse_events_csv(std::string_view dividendsText,
                                             std::string_view splitsText) {
    std::map<Date, CorporateEvent> byDate;

    std::set<Date> divSeen;
    if (!dividendsText.empty()) {
        for_each_line(dividendsText, [&](std::string_view line, std::size_t lineNo) {
            if (lineNo == 1) {
                if (line != kDividendHeader)
                    throw FormatError("bad dividends header '" + std::string(line) + "'");
                return;
            }
            if (line.empty()) return;
            auto fields = split_fields(line);
            if (fields.size() != 2) throw RowError(lineNo, "expected 2 fields");
            Date date = parse_date_field(fields[0], lineNo);
            double amount = parse_number(fields[1], lineNo, "dividend");
            if (amount < 0.0) throw RowError(lineNo, "negative dividend");
            if (!divSeen.insert(date).second)
                throw DuplicateEventError("duplicate dividend date " + date.toString());
            auto& ev = byDate[date];
            ev.date = date;
            ev.dividend = amount;
        });
    }

    std::set<Date> splitSeen;
    if (!splitsText.empty()) {
        for_each_line(splitsText, [&](std::string_view line, std::size_t lineNo) {
            if (lineNo == 1) {
                if (line != kSplitHeader)
                    throw FormatError("bad splits header '" + std::string(line) + "'");
                return;
            }
            if (line.empty()) return;
            auto fields = split_fields(line);
            if (fields.size() != 2) throw RowError(lineNo, "expected 2 fields");
            Date date = parse_date_field(fields[0], lineNo);
            std::string_view ratio = fields[1];
            std::size_t colon = ratio.find(':');
            if (colon == std::string_view::npos)
                throw RowError(lineNo, "split ratio '" + std::string(ratio) + "' is not A:B");
            double num = parse_number(ratio.substr(0, colon), lineNo, "split numerator");
            double den = parse_number(ratio.substr(colon + 1), lineNo, "split denominator");
            if (den == 0.0) throw RowError(lineNo, "split ratio with zero denominator");
            if (num <= 0.0 || den <= 0.0) throw RowError(lineNo, "non-positive split ratio part");
            if (!splitSeen.insert(date).second)
                throw DuplicateEventError("duplicate split date " + date.toString());
            auto& ev = byDate[date];
            ev.date = date;
            ev.splitFactor = num / den;
        });
    }

    std::vector<CorporateEvent> events;
    events.reserve(byDate.size());
    for (auto& [date, ev] : byDate) events.push_back(ev);
    return events;
}

std::vector<Violation> validate_series(const PriceSeries& series) {
    std::vector<Violation> out;
    const auto& bars = series.bars;
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const DailyBar& b = bars[i];
        if (i > 0 && !(b.date > bars[i - 1].date))
            out.push_back({b.date, "bar-date-order", "bar dates must strictly increase"});
        if (!(b.open > 0.0) || !(b.close > 0.0))
            out.push_back({b.date, "bar-price-positive", "open and close must be > 0"});
        double lo = std::min(b.open, b.close);
        double hi = std::max(b.open, b.close);
        if (b.low && *b.low > lo)
            out.push_back({b.date, "bar-range", "low above min(open, close)"});
        if (b.high && *b.high < hi)
            out.push_back({b.date, "bar-range", "high below max(open, close)"});
    }
    const auto& events = series.events;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const CorporateEvent& e = events[i];
        if (i > 0 && !(e.date > events[i - 1].date))
            out.push_back({e.date, "event-date-order", "event dates must strictly increase"});
        if (e.dividend < 0.0)
            out.push_back({e.date, "event-dividend-negative", "dividend must be >= 0"});
        if (!(e.splitFactor > 0.0))
            out.push_back({e.date, "event-split-nonpositive", "split factor must be > 0"});
        if (bars.empty() || e.date > bars.back().date)
            out.push_back({e.date, "event-after-last-bar", "event dated after the last bar"});
    }
    return out;
}

PriceSeries back_adjust_splits(const PriceSeries& series) {
    PriceSeries out = series;

    // Suffix products of split factors, so factorAfter(d) is the product of
    // every split dated strictly after d.
    std::vector<std::pair<Date, double>> splits;
    for (const auto& e : series.events)
        if (e.splitFactor != 1.0) splits.emplace_back(e.date, e.splitFactor);
    std::vector<double> suffix(splits.size() + 1, 1.0);
    for (std::size_t i = splits.size(); i-- > 0;) suffix[i] = splits[i].second * suffix[i + 1];

    auto factorAfter = [&](Date d) {
        auto it = std::upper_bound(splits.begin(), splits.end(), d,
                                   [](Date lhs, const auto& s) { return lhs < s.first; });
        return suffix[static_cast<std::size_t>(it - splits.begin())];
    };

    for (auto& bar : out.bars) {
        double f = factorAfter(bar.date);
        if (f == 1.0) continue;
        bar.open /= f;
        bar.close /= f;
        if (bar.high) *bar.high /= f;
        if (bar.low) *bar.low /= f;
    }
    for (auto& ev : out.events) {
        double f = factorAfter(ev.date);
        if (ev.dividend != 0.0 && f != 1.0) ev.dividend /= f;
        ev.splitFactor = 1.0;
    }
    return out;
}

std::string serialize_price_csv(const PriceSeries& series) {
    std::string out{kPriceHeader};
    out.push_back('\n');
    for (const auto& bar : series.bars) {
        out += bar.date.toString();
        out.push_back(',');
        append_number(out, bar.open);
        out.push_back(',');
        if (bar.high) append_number(out, *bar.high); else out += "null";
        out.push_back(',');
        if (bar.low) append_number(out, *bar.low); else out += "null";
        out.push_back(',');
        append_number(out, bar.close);
        out.push_back(',');
        append_number(out, bar.close);
        out.push_back(',');
        if (bar.volume) out += std::to_string(*bar.volume); else out += "null";
        out.push_back('\n');
    }
    return out;
}

std::string serialize_dividends_csv(const std::vector<CorporateEvent>& events) {
    std::string out{kDividendHeader};
    out.push_back('\n');
    for (const auto& e : events) {
        if (e.dividend == 0.0) continue;
        out += e.date.toString();
        out.push_back(',');
        append_number(out, e.dividend);
        out.push_back('\n');
    }
    return out;
}

std::string serialize_splits_csv(const std::vector<CorporateEvent>& events) {
    std::string out{kSplitHeader};
    out.push_back('\n');
    for (const auto& e : events) {
        if (e.splitFactor == 1.0) continue;
        out += e.date.toString();
        out.push_back(',');
        append_number(out, e.splitFactor);
        out += ":1\n";
    }
    return out;
}

PriceSeries clip_to_range(const PriceSeries& series, const DateRange& range) {
    PriceSeries out;
    out.instrumentId = series.instrumentId;
    out.currency = series.currency;
    for (const auto& bar : series.bars)
        if (range.contains(bar.date)) out.bars.push_back(bar);
    if (out.bars.empty()) return out;
    Date first = out.bars.front().date;
    Date last = out.bars.back().date;
    for (const auto& e : series.events)
        if (first <= e.date && e.date <= last) out.events.push_back(e);
    return out;
}

}  // namespace sessionsplit
