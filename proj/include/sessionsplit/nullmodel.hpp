#pragma once

#include <cstdint>

#include "sessionsplit/prices.hpp"
#include "sessionsplit/stats.hpp"

namespace sessionsplit {

// Geometric random walk with separate overnight and intraday legs. Normal
// log-returns keep every simulated price positive, so the output always
// passes series validation.
struct GbmParams {
    int nDays = 2;
    double startPrice = 100.0;
    double muOvernight = 0.0;     // per-session drift of log-returns
    double muIntraday = 0.0;
    double sigmaOvernight = 0.0;  // per-session stdev of log-returns, >= 0
    double sigmaIntraday = 0.0;
    std::uint64_t seed = 0;
};

// Simulates daily bars on consecutive calendar dates. Each (seed, day,
// session) triple maps to exactly one normal draw, so the series is
// deterministic and independent of generation order. open[0] = startPrice;
// later opens apply the overnight leg to the prior close; closes apply the
// intraday leg to the same day's open. No corporate events.
PriceSeries simulate_series(const GbmParams& params);

struct CalibrationResult {
    int trials = 0;
    int flagged = 0;

    double flaggedFraction() const {
        return trials == 0 ? 0.0 : static_cast<double>(flagged) / trials;
    }
};

// False-positive rate of classify_suspicion under the zero-drift null: runs
// `trials` independent simulations (per-trial seeds derived from params.seed)
// through decomposition and classification. Requires both drifts zero and
// trials >= 100.
CalibrationResult calibrate_false_positive_rate(const GbmParams& params, int trials,
                                                const Thresholds& thresholds);

}  // namespace sessionsplit
