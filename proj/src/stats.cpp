#include "sessionsplit/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sessionsplit/errors.hpp"
#include "sessionsplit/rng.hpp"

namespace sessionsplit {

std::vector<double> default_return_edges() {
    const int bins = 101;
    const double lo = -0.05, hi = 0.05;
    std::vector<double> edges(bins + 1);
    for (int k = 0; k <= bins; ++k) edges[k] = (lo * (bins - k) + hi * k) / bins;
    return edges;
}

Histogram build_histogram(std::span<const double> values, std::vector<double> edges) {
    if (edges.size() < 2) throw DomainError("histogram needs at least 2 edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw DomainError("histogram edges must strictly increase");

    Histogram hist;
    hist.counts.assign(edges.size() - 1, 0);
    for (double v : values) {
        if (std::isnan(v)) throw DomainError("NaN observation in histogram input");
        std::size_t bin;
        if (v < edges.front()) {
            bin = 0;
        } else if (v >= edges.back()) {
            bin = hist.counts.size() - 1;
        } else {
            auto it = std::upper_bound(edges.begin(), edges.end(), v);
            bin = static_cast<std::size_t>(it - edges.begin()) - 1;
        }
        ++hist.counts[bin];
    }
    hist.edges = std::move(edges);
    return hist;
}

std::pair<std::uint64_t, std::uint64_t> tail_masses(const Histogram& hist, double cut) {
    std::uint64_t left = 0, right = 0;
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        if (hist.edges[i + 1] <= -cut) left += hist.counts[i];
        if (hist.edges[i] >= cut) right += hist.counts[i];
    }
    return {left, right};
}

namespace {

// Sums in sorted order so the result depends only on the multiset of values:
// relabeling days can never move the variance by even an ulp.
double population_variance(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= static_cast<double>(sorted.size());
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(sorted.size());
}

}  // namespace

VarianceStats variance_split(std::span<const double> overnight,
                             std::span<const double> intraday) {
    if (overnight.size() < 2 || intraday.size() < 2)
        throw InsufficientDataError("variance_split needs >= 2 returns in each stream");
    VarianceStats vs;
    vs.varOvernight = population_variance(overnight);
    vs.varIntraday = population_variance(intraday);
    double total = vs.varOvernight + vs.varIntraday;
    if (total <= 0.0) throw DegenerateError("both return streams are constant");
    vs.intradayFraction = vs.varIntraday / total;
    return vs;
}

VarianceStats variance_split(const SessionReturnSeries& srs) {
    return variance_split(srs.definedOvernight(), srs.definedIntraday());
}

double straightness_r2(const WealthCurve& curve) {
    const auto& w = curve.values;
    const std::size_t n = w.size();
    if (n < 3) throw DomainError("straightness needs a curve of length >= 3");

    double ymean = 0.0;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(w[i] > 0.0)) throw DomainError("log-wealth undefined for non-positive value");
        y[i] = std::log(w[i]);
        ymean += y[i];
    }
    ymean /= static_cast<double>(n);
    const double xmean = static_cast<double>(n - 1) / 2.0;

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = static_cast<double>(i) - xmean;
        double dy = y[i] - ymean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (syy == 0.0) throw DegenerateError("constant log-wealth, straightness undefined");
    double r2 = (sxy * sxy) / (sxx * syy);
    return std::clamp(r2, 0.0, 1.0);
}

PermutationResult divergence_permutation_test(std::span<const double> overnight,
                                              std::span<const double> intraday,
                                              int nPermutations, std::uint64_t seed) {
    if (overnight.size() != intraday.size())
        throw AlignmentError("return streams differ in length");
    if (overnight.size() < 10)
        throw InsufficientDataError("permutation test needs >= 10 paired days, got " +
                                    std::to_string(overnight.size()));
    if (nPermutations < 1) throw DomainError("nPermutations must be positive");

    const std::size_t n = overnight.size();
    std::vector<double> gap(n);
    for (std::size_t t = 0; t < n; ++t) {
        double on = overnight[t], in = intraday[t];
        if (std::isnan(on) || std::isnan(in)) throw DomainError("undefined return in test input");
        if (on <= -1.0 || in <= -1.0) throw DomainError("return <= -100% in test input");
        gap[t] = std::log1p(on) - std::log1p(in);
    }
    double observed = 0.0;
    for (double d : gap) observed += d;

    // Each permutation's flip pattern is keyed by (seed, permutation index):
    // the count is the same no matter how the loop is scheduled.
    std::uint64_t countGE = 0;
    for (int k = 0; k < nPermutations; ++k) {
        const std::uint64_t key = mix_keys(seed, static_cast<std::uint64_t>(k) + 1);
        double sum = 0.0;
        std::size_t t = 0;
        for (std::uint64_t word = 0; t < n; ++word) {
            std::uint64_t bits = splitmix64(mix_keys(key, word));
            for (unsigned j = 0; j < 64 && t < n; ++j, ++t)
                sum += ((bits >> j) & 1u) ? -gap[t] : gap[t];
        }
        if (sum >= observed) ++countGE;
    }

    PermutationResult result;
    result.statistic = observed;
    result.pValue = (1.0 + static_cast<double>(countGE)) /
                    (static_cast<double>(nPermutations) + 1.0);
    return result;
}

PermutationResult divergence_permutation_test(const SessionReturnSeries& srs, int nPermutations,
                                              std::uint64_t seed) {
    std::span<const double> in{srs.intraday};
    return divergence_permutation_test(srs.definedOvernight(),
                                       in.empty() ? in : in.subspan(1), nPermutations, seed);
}

SuspicionMetrics classify_suspicion(const SessionReturnSeries& srs, const WealthCurvePair& curves,
                                    const Thresholds& thresholds) {
    if (!(thresholds.alpha > 0.0) || thresholds.alpha > 1.0)
        throw DomainError("alpha must be in (0, 1]");
    if (thresholds.minStraightness < 0.0 || thresholds.minStraightness > 1.0)
        throw DomainError("minStraightness must be in [0, 1]");
    if (curves.overnight.values.empty() || curves.intraday.values.empty())
        throw EmptySeriesError("empty wealth curve");

    SuspicionMetrics m;
    m.cumOvernight = curves.overnight.values.back() - 1.0;
    m.cumIntraday = curves.intraday.values.back() - 1.0;

    auto perm = divergence_permutation_test(srs, thresholds.nPermutations, thresholds.seed);
    m.logWealthGap = perm.statistic;
    m.pValue = perm.pValue;

    auto fit = [](const WealthCurve& c) -> std::optional<double> {
        try {
            return straightness_r2(c);
        } catch (const DegenerateError&) {
            return std::nullopt;
        }
    };
    m.straightnessOvernight = fit(curves.overnight);
    m.straightnessIntraday = fit(curves.intraday);

    bool straightEnough = true;
    if (m.straightnessOvernight && m.straightnessIntraday)
        straightEnough = std::min(*m.straightnessOvernight, *m.straightnessIntraday) >=
                         thresholds.minStraightness;
    m.flagged = (m.cumIntraday < 0.0) && (m.pValue < thresholds.alpha) && straightEnough;
    return m;
}

}  // namespace sessionsplit
