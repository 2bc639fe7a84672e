#include "sessionsplit/nullmodel.hpp"

#include <cmath>

#include "sessionsplit/decompose.hpp"
#include "sessionsplit/errors.hpp"
#include "sessionsplit/rng.hpp"

namespace sessionsplit {

namespace {

// Session tags for the draw keys.
constexpr std::uint64_t kOvernight = 1;
constexpr std::uint64_t kIntraday = 2;

double session_log_return(std::uint64_t seed, int day, std::uint64_t session, double mu,
                          double sigma) {
    if (sigma == 0.0) return mu;
    return mu + sigma * standard_normal(mix_keys(seed, static_cast<std::uint64_t>(day), session));
}

}  // namespace

PriceSeries simulate_series(const GbmParams& params) {
    if (params.nDays < 2) throw DomainError("simulation needs nDays >= 2");
    if (!(params.startPrice > 0.0)) throw DomainError("startPrice must be > 0");
    if (params.sigmaOvernight < 0.0 || params.sigmaIntraday < 0.0)
        throw DomainError("sigmas must be >= 0");

    // Fixed synthetic calendar; any gap is one overnight period anyway.
    const Date firstDate = Date::fromYmd(2000, 1, 3);

    PriceSeries series;
    series.instrumentId = "SIM";
    series.bars.reserve(static_cast<std::size_t>(params.nDays));
    double prevClose = params.startPrice;
    for (int t = 0; t < params.nDays; ++t) {
        DailyBar bar;
        bar.date = firstDate.plusDays(t);
        if (t == 0) {
            bar.open = params.startPrice;
        } else {
            double g = session_log_return(params.seed, t, kOvernight, params.muOvernight,
                                          params.sigmaOvernight);
            bar.open = prevClose * std::exp(g);
        }
        double h = session_log_return(params.seed, t, kIntraday, params.muIntraday,
                                      params.sigmaIntraday);
        bar.close = bar.open * std::exp(h);
        prevClose = bar.close;
        series.bars.push_back(bar);
    }
    return series;
}

CalibrationResult calibrate_false_positive_rate(const GbmParams& params, int trials,
                                                const Thresholds& thresholds) {
    if (params.muOvernight != 0.0 || params.muIntraday != 0.0)
        throw DomainError("calibration requires zero drifts");
    if (trials < 100) throw DomainError("calibration needs >= 100 trials");

    CalibrationResult result;
    result.trials = trials;
    for (int i = 0; i < trials; ++i) {
        GbmParams p = params;
        p.seed = mix_keys(params.seed, static_cast<std::uint64_t>(i) + 1);
        Thresholds thr = thresholds;
        thr.seed = mix_keys(thresholds.seed, static_cast<std::uint64_t>(i) + 0x5EED);

        PriceSeries series = simulate_series(p);
        SessionReturnSeries srs = decompose_series(series, DividendPolicy::Reinvest);
        WealthCurvePair curves = wealth_curves(srs);
        SuspicionMetrics metrics = classify_suspicion(srs, curves, thr);
        if (metrics.flagged) ++result.flagged;
    }
    return result;
}

}  // namespace sessionsplit
