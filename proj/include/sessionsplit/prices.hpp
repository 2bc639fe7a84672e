#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sessionsplit/dates.hpp"

namespace sessionsplit {

// One trading day of an instrument. Open and close must be positive for the
// series to validate; high/low/volume are carried through when the source has
// them and ignored otherwise.
struct DailyBar {
    Date date;
    double open = 0.0;
    double close = 0.0;
    std::optional<double> high;
    std::optional<double> low;
    std::optional<std::uint64_t> volume;

    friend bool operator==(const DailyBar&, const DailyBar&) = default;
};

// Cash dividend and/or split taking effect on `date`. splitFactor is
// shares-after per share-before (a 4:1 split has factor 4).
struct CorporateEvent {
    Date date;
    double dividend = 0.0;
    double splitFactor = 1.0;

    friend bool operator==(const CorporateEvent&, const CorporateEvent&) = default;
};

// Canonical ingested history for one instrument: bars and events, both
// ordered by strictly increasing date.
struct PriceSeries {
    std::string instrumentId;
    std::string currency = "local";
    std::vector<DailyBar> bars;
    std::vector<CorporateEvent> events;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;
};

}  // namespace sessionsplit
