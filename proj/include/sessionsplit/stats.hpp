#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sessionsplit/decompose.hpp"

namespace sessionsplit {

// Fixed-edge histogram. The leftmost bin absorbs underflow and the rightmost
// absorbs overflow, so the counts always sum to the number of observations.
struct Histogram {
    std::vector<double> edges;   // strictly increasing, size m+1
    std::vector<std::uint64_t> counts;  // size m

    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (auto c : counts) n += c;
        return n;
    }
};

// Default binning used for the return-distribution figure: 101 uniform bins
// on [-5%, +5%].
std::vector<double> default_return_edges();

struct VarianceStats {
    double varOvernight = 0.0;
    double varIntraday = 0.0;
    double intradayFraction = 0.0;  // varIntraday / (varIntraday + varOvernight)
};

struct SuspicionMetrics {
    double cumOvernight = 0.0;  // final overnight wealth - 1
    double cumIntraday = 0.0;   // final intraday wealth - 1
    double logWealthGap = 0.0;  // sum log(1+overnight) - sum log(1+intraday)
    std::optional<double> straightnessOvernight;  // R^2 of log-wealth vs day index
    std::optional<double> straightnessIntraday;
    double pValue = 1.0;
    bool flagged = false;
};

struct Thresholds {
    double alpha = 0.01;
    double minStraightness = 0.8;
    int nPermutations = 10000;
    std::uint64_t seed = 0;
};

// Bins values with half-open [edge[i], edge[i+1]) intervals; anything below
// the first edge lands in bin 0, anything at or above the last edge lands in
// the last bin. Throws DomainError on fewer than 2 edges, non-increasing
// edges, or a NaN value.
Histogram build_histogram(std::span<const double> values, std::vector<double> edges);

// Counts in bins entirely at or beyond +-cut (the edge bins already hold
// everything outside the axis). Returns {leftTail, rightTail}.
std::pair<std::uint64_t, std::uint64_t> tail_masses(const Histogram& hist, double cut);

// Population variances of the two raw value lists and the intraday share of
// their sum. Throws DegenerateError when both variances are zero,
// InsufficientDataError with fewer than 2 values on either side.
VarianceStats variance_split(std::span<const double> overnight, std::span<const double> intraday);

// Same over a return series' defined entries (intraday has one more day).
VarianceStats variance_split(const SessionReturnSeries& srs);

// R^2 of the least-squares line through (day index, log wealth). 1 means the
// curve is an exact exponential; the paper's "striking consistency" made
// quantitative. Throws DomainError for length < 3 or non-positive values,
// DegenerateError when log-wealth is constant.
double straightness_r2(const WealthCurve& curve);

struct PermutationResult {
    double statistic = 0.0;  // observed sum of per-day log-return gaps
    double pValue = 1.0;
};

// One-sided sign-flip permutation test of the overnight-minus-intraday
// log-return gap. Each day's gap keeps or flips its sign with probability
// 1/2 under the null; p = (1 + #{S_perm >= S}) / (nPermutations + 1).
// Deterministic given the seed, regardless of evaluation order.
PermutationResult divergence_permutation_test(std::span<const double> overnight,
                                              std::span<const double> intraday,
                                              int nPermutations, std::uint64_t seed);

// Series overload: uses the days where both streams are defined (>= 10).
PermutationResult divergence_permutation_test(const SessionReturnSeries& srs, int nPermutations,
                                              std::uint64_t seed);

// Assembles all suspicion metrics and applies the flag rule:
//   flagged = cumIntraday < 0  AND  pValue < alpha
//             AND min(R^2s) >= minStraightness (only when both are defined).
// A degenerate straightness leaves that component unset and out of the
// conjunction.
SuspicionMetrics classify_suspicion(const SessionReturnSeries& srs, const WealthCurvePair& curves,
                                    const Thresholds& thresholds);

}  // namespace sessionsplit
