#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sessionsplit/decompose.hpp"
#include "sessionsplit/stats.hpp"

namespace sessionsplit {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

enum class AxisScale { Log, Linear };

// Styling for one wealth panel. Log panels plot wealth itself; linear panels
// plot cumulative return (wealth - 1), optionally floored (yFloor = -1 pins
// the bottom of the plot at -100%).
struct PanelSpec {
    std::string title;
    AxisScale scale = AxisScale::Log;
    std::string overnightColor = "blue";
    std::string intradayColor = "green";
    bool markEndpoints = true;
    std::optional<double> yFloor;
};

struct ReportMetadata {
    std::string instrumentId;
    DividendPolicy policy = DividendPolicy::Reinvest;
    DateRange dateRange;
    std::string dataProvenance;
    std::string toolVersion = kToolVersion;
    std::uint64_t seed = 0;
};

// Everything one run produces for one instrument, ready to serialize.
struct ReportBundle {
    ReportMetadata metadata;
    WealthCurvePair curves;
    SuspicionMetrics metrics;
    Histogram overnightHistogram;
    Histogram intradayHistogram;
    std::optional<VarianceStats> variance;  // absent when the series is degenerate
};

// Runs classification, histograms, and the variance split over one series
// and packs the result. The histograms use the default return edges.
ReportBundle build_report_bundle(const SessionReturnSeries& srs, const WealthCurvePair& curves,
                                 const Thresholds& thresholds, const ReportMetadata& metadata);

// Deterministic JSON document: stable field order, 12 significant digits,
// byte-identical for equal bundles. Schema documented in the README.
std::string emit_report_json(const ReportBundle& bundle);

// Per-day CSV: Date,OvernightReturn,IntradayReturn,OvernightWealth,IntradayWealth.
// Day 1's overnight return serializes as an empty field. Throws
// AlignmentError when the series and curves disagree on length.
std::string emit_series_csv(const SessionReturnSeries& srs, const WealthCurvePair& curves);

// One panel with both wealth polylines, anchored at 1 on the left, endpoint
// values printed to 2 decimals when markEndpoints. Log scale throws
// DomainError on non-positive values.
std::string render_wealth_panel_svg(const WealthCurvePair& curves, const PanelSpec& spec);

// Lays previously rendered panels out row-major at fixed cell size.
std::string render_grid_svg(const std::vector<std::string>& panels, int columns);

// Overlaid step outlines of two histograms over identical edges. Edge bins
// draw like interior bins; they already hold the under/overflow.
std::string render_histogram_svg(const Histogram& histA, const Histogram& histB,
                                 const std::pair<std::string, std::string>& labels);

}  // namespace sessionsplit
