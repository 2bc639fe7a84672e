#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "sessionsplit/errors.hpp"

namespace sessionsplit {

// Calendar day, stored as days since 1970-01-01. Cheap to copy and compare;
// all formatting is ISO-8601 (YYYY-MM-DD) and locale independent.
class Date {
public:
    Date() = default;
    explicit Date(std::int32_t daysSinceEpoch) : days_(daysSinceEpoch) {}

    static Date fromYmd(int year, unsigned month, unsigned day) {
        using namespace std::chrono;
        year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                           std::chrono::day{day}};
        if (!ymd.ok())
            throw DomainError("invalid calendar date " + std::to_string(year) + "-" +
                              std::to_string(month) + "-" + std::to_string(day));
        return Date(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
    }

    // Strict YYYY-MM-DD. Returns nullopt on anything else.
    static std::optional<Date> tryParse(std::string_view text);

    // Same, but throws DomainError.
    static Date parse(std::string_view text) {
        auto d = tryParse(text);
        if (!d) throw DomainError("bad date '" + std::string(text) + "', expected YYYY-MM-DD");
        return *d;
    }

    std::string toString() const;

    std::int32_t daysSinceEpoch() const { return days_; }
    std::int64_t epochSeconds() const { return std::int64_t{days_} * 86400; }

    Date plusDays(std::int32_t n) const { return Date(days_ + n); }

    // Monday..Friday. Useful for generating realistic trading calendars.
    bool isWeekday() const {
        using namespace std::chrono;
        weekday wd{sys_days{days{days_}}};
        return wd != Saturday && wd != Sunday;
    }

    friend auto operator<=>(Date, Date) = default;

private:
    std::int32_t days_ = 0;
};

struct DateRange {
    Date start;
    Date end;  // inclusive

    bool contains(Date d) const { return start <= d && d <= end; }
};

}  // namespace sessionsplit
