#pragma once

#include <span>
#include <string>
#include <vector>

#include "sessionsplit/prices.hpp"

namespace sessionsplit {

// What happens to a cash dividend, which always lands while the market is
// closed: reinvested at the ex-date open (taxes ignored), or discarded.
// The choice only moves the overnight stream; intraday is untouched.
enum class DividendPolicy { Reinvest, Drop };

std::string to_string(DividendPolicy policy);
DividendPolicy dividend_policy_from_string(const std::string& name);

// Per-day overnight and intraday simple returns for one instrument, aligned
// with `dates`. overnight[0] is undefined (quiet NaN): day 1 has no prior
// close. Every defined entry is > -1.
struct SessionReturnSeries {
    std::string instrumentId;
    std::vector<Date> dates;
    std::vector<double> overnight;
    std::vector<double> intraday;
    DividendPolicy policy = DividendPolicy::Reinvest;

    std::size_t size() const { return dates.size(); }

    // The defined slices: overnight skips day 1, intraday covers every day.
    std::span<const double> definedOvernight() const {
        return overnight.empty() ? std::span<const double>{}
                                 : std::span<const double>{overnight}.subspan(1);
    }
    std::span<const double> definedIntraday() const { return intraday; }
};

// Multiplicative wealth path: values.front() == 1 on dates.front().
struct WealthCurve {
    std::string label;  // "overnight" or "intraday"
    std::vector<Date> dates;
    std::vector<double> values;
};

// Simple return over the closed market: previous close to today's open.
// Under Reinvest the cash dividend is bought back in at the open.
double overnight_return(double prevClose, double open, double dividend, DividendPolicy policy);

// Simple return from open to close of the same day; dividend policy never
// enters (nothing is paid while the market trades).
double intraday_return(double open, double close);

// Splits a validated series (length >= 2) into the two return streams.
// Dividends attach to the overnight leg of their exact ex-date.
SessionReturnSeries decompose_series(const PriceSeries& series, DividendPolicy policy);

// Compounds a stream of simple returns into wealth, starting from 1 before
// the first entry: output has returns.size()+1 values. A NaN leading entry
// counts as factor 1; any other NaN or a return <= -1 throws DomainError.
std::vector<double> cumulative_wealth(std::span<const double> returns);

struct WealthCurvePair {
    WealthCurve overnight;
    WealthCurve intraday;
};

// The two curves of the figure: both anchored at 1 on day 1, both picking up
// their first factor on day 2. Day 1's intraday return is reported in the
// series but not compounded, so the curves stay comparable.
WealthCurvePair wealth_curves(const SessionReturnSeries& srs);

}  // namespace sessionsplit
