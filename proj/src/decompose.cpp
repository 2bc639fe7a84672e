#include "sessionsplit/decompose.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "sessionsplit/errors.hpp"

namespace sessionsplit {

std::string to_string(DividendPolicy policy) {
    return policy == DividendPolicy::Reinvest ? "reinvest" : "drop";
}

DividendPolicy dividend_policy_from_string(const std::string& name) {
    if (name == "reinvest") return DividendPolicy::Reinvest;
    if (name == "drop") return DividendPolicy::Drop;
    throw DomainError("unknown dividend policy '" + name + "'");
}

double overnight_return(double prevClose, double open, double dividend, DividendPolicy policy) {
    if (!(prevClose > 0.0) || !(open > 0.0))
        throw DomainError("overnight_return requires positive prices");
    if (dividend < 0.0) throw DomainError("negative dividend");
    double numerator = policy == DividendPolicy::Reinvest ? open + dividend : open;
    return numerator / prevClose - 1.0;
}

double intraday_return(double open, double close) {
    if (!(open > 0.0) || !(close > 0.0))
        throw DomainError("intraday_return requires positive prices");
    return close / open - 1.0;
}

SessionReturnSeries decompose_series(const PriceSeries& series, DividendPolicy policy) {
    const auto& bars = series.bars;
    if (bars.size() < 2)
        throw EmptySeriesError("need at least 2 bars to decompose, got " +
                               std::to_string(bars.size()));

    std::map<Date, double> dividendOn;
    for (const auto& e : series.events)
        if (e.dividend != 0.0) dividendOn[e.date] = e.dividend;

    SessionReturnSeries srs;
    srs.instrumentId = series.instrumentId;
    srs.policy = policy;
    srs.dates.reserve(bars.size());
    srs.overnight.reserve(bars.size());
    srs.intraday.reserve(bars.size());

    for (std::size_t t = 0; t < bars.size(); ++t) {
        const DailyBar& bar = bars[t];
        srs.dates.push_back(bar.date);
        srs.intraday.push_back(intraday_return(bar.open, bar.close));
        if (t == 0) {
            srs.overnight.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            double dividend = 0.0;
            if (auto it = dividendOn.find(bar.date); it != dividendOn.end())
                dividend = it->second;
            srs.overnight.push_back(
                overnight_return(bars[t - 1].close, bar.open, dividend, policy));
        }
    }
    return srs;
}

std::vector<double> cumulative_wealth(std::span<const double> returns) {
    std::vector<double> wealth;
    wealth.reserve(returns.size() + 1);
    wealth.push_back(1.0);
    for (std::size_t i = 0; i < returns.size(); ++i) {
        double r = returns[i];
        if (std::isnan(r)) {
            if (i != 0) throw DomainError("undefined return past the leading entry");
            wealth.push_back(wealth.back());
            continue;
        }
        if (r <= -1.0)
            throw DomainError("return <= -100% would wipe out or negate wealth");
        wealth.push_back(wealth.back() * (1.0 + r));
    }
    return wealth;
}

WealthCurvePair wealth_curves(const SessionReturnSeries& srs) {
    if (srs.size() < 2) throw EmptySeriesError("need at least 2 days of returns");
    std::span<const double> on{srs.overnight};
    std::span<const double> in{srs.intraday};

    WealthCurvePair curves;
    curves.overnight.label = "overnight";
    curves.overnight.dates = srs.dates;
    curves.overnight.values = cumulative_wealth(on.subspan(1));
    curves.intraday.label = "intraday";
    curves.intraday.dates = srs.dates;
    curves.intraday.values = cumulative_wealth(in.subspan(1));
    return curves;
}

}  // namespace sessionsplit
