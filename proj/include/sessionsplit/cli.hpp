#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sessionsplit/decompose.hpp"
#include "sessionsplit/stats.hpp"

namespace sessionsplit {

// Effective settings for one invocation, after merging defaults, the JSON
// config file, command-line flags, and SESSION_SPLIT_OFFLINE.
struct RunConfig {
    std::vector<std::string> instruments;
    std::optional<DateRange> dateRange;
    DividendPolicy policy = DividendPolicy::Reinvest;
    Thresholds thresholds;
    std::string dataDir = "data";
    std::string outputDir = "out";
    std::string endpointTemplate;
    bool offline = false;
    bool rawSplits = false;  // apply split back-adjustment to raw feeds
    int jobs = 1;
    int columns = 3;
    double timeoutSeconds = 30.0;
};

// Dispatches one of: fetch, decompose, report, scan, grid, simulate.
// Returns 0 on success, 1 on data errors, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sessionsplit
