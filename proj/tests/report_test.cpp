#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sessionsplit/errors.hpp"
#include "sessionsplit/report.hpp"
#include "testutil.hpp"

using namespace sessionsplit;

namespace {

WealthCurve make_curve(const char* label, std::vector<double> values) {
    WealthCurve c;
    c.label = label;
    for (std::size_t i = 0; i < values.size(); ++i) c.dates.push_back(testutil::day(int(i)));
    c.values = std::move(values);
    return c;
}

ReportBundle tiny_bundle() {
    ReportBundle bundle;
    bundle.metadata.instrumentId = "TINY";
    bundle.metadata.dateRange = {testutil::day(0), testutil::day(1)};
    bundle.metadata.dataProvenance = "unit test";
    bundle.metadata.seed = 7;
    bundle.curves.overnight = make_curve("overnight", {1.0, 1.02});
    bundle.curves.intraday = make_curve("intraday", {1.0, 0.99});
    bundle.metrics.cumOvernight = 0.02;
    bundle.metrics.cumIntraday = -0.01;
    bundle.metrics.logWealthGap = 1.0 / 3.0;
    bundle.metrics.pValue = 0.5;
    std::vector<double> on{0.02};
    std::vector<double> in{0.0, -0.01};
    bundle.overnightHistogram = build_histogram(on, default_return_edges());
    bundle.intradayHistogram = build_histogram(in, default_return_edges());
    return bundle;
}

SessionReturnSeries tiny_srs() {
    SessionReturnSeries srs;
    srs.instrumentId = "TINY";
    srs.dates = {testutil::day(0), testutil::day(1)};
    srs.overnight = {std::numeric_limits<double>::quiet_NaN(), 0.02};
    srs.intraday = {0.0, -0.01};
    return srs;
}

}  // namespace

TEST_CASE("report JSON carries the endpoint keys and parses clean") {
    ReportBundle bundle = tiny_bundle();
    std::string doc = emit_report_json(bundle);
    CHECK(doc.find("\"finalOvernightWealth\"") != std::string::npos);
    CHECK(doc.find("\"finalIntradayWealth\"") != std::string::npos);
    CHECK(doc.find("\"schemaVersion\": 1") != std::string::npos);

    auto parsed = nlohmann::json::parse(doc);
    CHECK(parsed["instrumentId"] == "TINY");
    CHECK(parsed["finalOvernightWealth"].get<double>() == doctest::Approx(1.02));
    CHECK(parsed["metrics"]["straightnessOvernight"].is_null());
    CHECK(parsed["histograms"]["edges"].size() == 102);
}

TEST_CASE("report JSON is byte-identical across calls and orders keys stably") {
    ReportBundle bundle = tiny_bundle();
    std::string a = emit_report_json(bundle);
    std::string b = emit_report_json(bundle);
    CHECK(a == b);
    CHECK(a.find("\"schemaVersion\"") < a.find("\"instrumentId\""));
    CHECK(a.find("\"metrics\"") < a.find("\"histograms\""));
}

TEST_CASE("report JSON serializes with 12 significant digits") {
    ReportBundle bundle = tiny_bundle();
    std::string doc = emit_report_json(bundle);
    // logWealthGap = 1/3
    CHECK(doc.find("0.333333333333") != std::string::npos);
    CHECK(doc.find("0.3333333333333") == std::string::npos);  // not 13
}

TEST_CASE("report JSON maps the flag") {
    ReportBundle bundle = tiny_bundle();
    bundle.metrics.flagged = true;
    std::string doc = emit_report_json(bundle);
    CHECK(doc.find("\"flagged\": true") != std::string::npos);
}

TEST_CASE("series CSV layout and the empty day-1 overnight field") {
    SessionReturnSeries srs = tiny_srs();
    WealthCurvePair curves;
    curves.overnight = make_curve("overnight", {1.0, 1.02});
    curves.intraday = make_curve("intraday", {1.0, 0.99});
    std::string csv = emit_series_csv(srs, curves);

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "Date,OvernightReturn,IntradayReturn,OvernightWealth,IntradayWealth");
    std::getline(lines, line);
    CHECK(line == "2020-01-01,,0,1,1");
    std::getline(lines, line);
    CHECK(line == "2020-01-02,0.02,-0.01,1.02,0.99");
}

TEST_CASE("series CSV round-trips values to 12 significant digits") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> dist(0.0, 0.01);
    SessionReturnSeries srs;
    srs.dates.push_back(testutil::day(0));
    srs.overnight.push_back(std::numeric_limits<double>::quiet_NaN());
    srs.intraday.push_back(dist(rng));
    for (int t = 1; t < 50; ++t) {
        srs.dates.push_back(testutil::day(t));
        srs.overnight.push_back(dist(rng));
        srs.intraday.push_back(dist(rng));
    }
    WealthCurvePair curves = wealth_curves(srs);
    std::string csv = emit_series_csv(srs, curves);

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    for (std::size_t t = 0; t < srs.size(); ++t) {
        REQUIRE(std::getline(lines, line));
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string f;
        while (std::getline(row, f, ',')) fields.push_back(f);
        REQUIRE(fields.size() == 5);
        if (t == 0) {
            CHECK(fields[1].empty());
        } else {
            CHECK(std::stod(fields[1]) ==
                  doctest::Approx(srs.overnight[t]).epsilon(1e-11));
        }
        CHECK(std::stod(fields[2]) == doctest::Approx(srs.intraday[t]).epsilon(1e-11));
        CHECK(std::stod(fields[3]) ==
              doctest::Approx(curves.overnight.values[t]).epsilon(1e-11));
        CHECK(std::stod(fields[4]) ==
              doctest::Approx(curves.intraday.values[t]).epsilon(1e-11));
    }
}

TEST_CASE("series CSV rejects misaligned inputs") {
    SessionReturnSeries srs = tiny_srs();
    WealthCurvePair curves;
    curves.overnight = make_curve("overnight", {1.0});
    curves.intraday = make_curve("intraday", {1.0, 0.99});
    CHECK_THROWS_AS(emit_series_csv(srs, curves), AlignmentError);
    CHECK_THROWS_AS(emit_series_csv(SessionReturnSeries{}, curves), AlignmentError);
}

TEST_CASE("flat curves render with 1.00 endpoint labels") {
    WealthCurvePair curves;
    curves.overnight = make_curve("overnight", {1.0, 1.0, 1.0});
    curves.intraday = make_curve("intraday", {1.0, 1.0, 1.0});
    PanelSpec spec;
    spec.title = "flat";
    std::string svg = render_wealth_panel_svg(curves, spec);
    CHECK(testutil::xml_well_formed(svg));
    CHECK(svg.find(">1.00</text>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("endpoint labels match the figure formatting") {
    WealthCurvePair curves;
    curves.overnight = make_curve("overnight", {1.0, 4.0, 17.48});
    curves.intraday = make_curve("intraday", {1.0, 0.97, 0.95});
    PanelSpec spec;
    spec.title = "endpoints";
    std::string svg = render_wealth_panel_svg(curves, spec);
    CHECK(svg.find(">17.48</text>") != std::string::npos);
    CHECK(svg.find(">0.95</text>") != std::string::npos);

    spec.markEndpoints = false;
    std::string bare = render_wealth_panel_svg(curves, spec);
    CHECK(bare.find(">17.48</text>") == std::string::npos);
}

TEST_CASE("linear panels can floor the axis at -100%") {
    WealthCurvePair curves;
    curves.overnight = make_curve("overnight", {1.0, 1.5, 2.0});
    curves.intraday = make_curve("intraday", {1.0, 0.5, 0.02});
    PanelSpec spec;
    spec.title = "linear";
    spec.scale = AxisScale::Linear;
    spec.yFloor = -1.0;
    std::string svg = render_wealth_panel_svg(curves, spec);
    CHECK(testutil::xml_well_formed(svg));
    CHECK(svg.find(">-100%</text>") != std::string::npos);
    CHECK(svg.find(">-98.00%</text>") != std::string::npos);  // intraday endpoint
}

TEST_CASE("log panels refuse non-positive values") {
    WealthCurvePair curves;
    curves.overnight = make_curve("overnight", {1.0, 0.0, 2.0});
    curves.intraday = make_curve("intraday", {1.0, 1.0, 1.0});
    PanelSpec spec;
    CHECK_THROWS_AS(render_wealth_panel_svg(curves, spec), DomainError);
    spec.scale = AxisScale::Linear;  // linear handles the same values fine
    curves.overnight.values[1] = 0.5;
    CHECK_NOTHROW(render_wealth_panel_svg(curves, spec));
}

TEST_CASE("grid lays panels out row-major at fixed cell size") {
    WealthCurvePair curves;
    curves.overnight = make_curve("overnight", {1.0, 1.1, 1.2});
    curves.intraday = make_curve("intraday", {1.0, 0.9, 0.8});
    PanelSpec spec;
    spec.title = "cell";
    std::string panel = render_wealth_panel_svg(curves, spec);

    std::vector<std::string> nine(9, panel);
    std::string grid9 = render_grid_svg(nine, 3);
    CHECK(testutil::xml_well_formed(grid9));
    CHECK(grid9.find("width=\"1080\"") != std::string::npos);   // 3 columns
    CHECK(grid9.find("height=\"780\"") != std::string::npos);   // 3 rows

    std::vector<std::string> twentyOne(21, panel);
    std::string grid21 = render_grid_svg(twentyOne, 3);
    CHECK(grid21.find("height=\"1820\"") != std::string::npos);  // ceil(21/3) = 7 rows

    std::string grid1 = render_grid_svg({panel}, 3);
    CHECK(testutil::xml_well_formed(grid1));
    CHECK(grid1.find("width=\"360\"") != std::string::npos);
    CHECK(grid1.find("cell") != std::string::npos);  // title preserved

    CHECK_THROWS_AS(render_grid_svg({}, 3), DomainError);
    CHECK_THROWS_AS(render_grid_svg({panel}, 0), DomainError);
}

TEST_CASE("histogram overlay renders and enforces shared edges") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> narrow(0.0, 0.01);
    std::normal_distribution<double> wide(0.0, 0.01 * std::sqrt(2.0));
    std::vector<double> blue(3000), green(3000);
    for (auto& v : blue) v = narrow(rng);
    for (auto& v : green) v = wide(rng);

    Histogram histBlue = build_histogram(blue, default_return_edges());
    Histogram histGreen = build_histogram(green, default_return_edges());

    // oracle: direct scan of the raw draws, no histogram involved
    auto direct = [](const std::vector<double>& vs, double cut) {
        std::pair<int, int> tails{0, 0};
        for (double v : vs) {
            if (v <= -cut) ++tails.first;
            if (v >= cut) ++tails.second;
        }
        return tails;
    };
    auto blueTails = direct(blue, 0.025);
    auto greenTails = direct(green, 0.025);
    CHECK(greenTails.first > blueTails.first);
    CHECK(greenTails.second > blueTails.second);

    // the histogram tail masses agree with the wider-green ordering
    auto blueMass = tail_masses(histBlue, 0.025);
    auto greenMass = tail_masses(histGreen, 0.025);
    CHECK(greenMass.first > blueMass.first);
    CHECK(greenMass.second > blueMass.second);

    std::string svg = render_histogram_svg(histBlue, histGreen, {"overnight", "intraday"});
    CHECK(testutil::xml_well_formed(svg));
    CHECK(svg.find("overnight") != std::string::npos);
    CHECK(svg.find("intraday") != std::string::npos);
    CHECK(svg.find("stroke=\"green\"") != std::string::npos);

    Histogram other = build_histogram(blue, {-0.1, 0.0, 0.1});
    CHECK_THROWS_AS(render_histogram_svg(histBlue, other, {"a", "b"}), AlignmentError);
}

TEST_CASE("identical histograms produce two coincident outlines") {
    std::vector<double> values{-0.02, 0.0, 0.01, 0.03};
    Histogram h = build_histogram(values, default_return_edges());
    std::string svg = render_histogram_svg(h, h, {"a", "b"});
    // same geometry, different colors
    auto first = svg.find("<path");
    auto second = svg.find("<path", first + 1);
    REQUIRE(second != std::string::npos);
    auto dOf = [&](std::size_t pos) {
        auto start = svg.find("d=\"", pos) + 3;
        return svg.substr(start, svg.find('"', start) - start);
    };
    CHECK(dOf(first) == dOf(second));
}

TEST_CASE("svg emitters are deterministic") {
    WealthCurvePair curves;
    curves.overnight = make_curve("overnight", {1.0, 1.3, 1.9});
    curves.intraday = make_curve("intraday", {1.0, 0.8, 0.6});
    PanelSpec spec;
    spec.title = "deterministic <&> title";
    std::string a = render_wealth_panel_svg(curves, spec);
    std::string b = render_wealth_panel_svg(curves, spec);
    CHECK(a == b);
    CHECK(testutil::xml_well_formed(a));
    CHECK(a.find("&lt;&amp;&gt;") != std::string::npos);
}
