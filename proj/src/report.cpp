#include "sessionsplit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sessionsplit/errors.hpp"

namespace sessionsplit {

namespace {

// ---------------------------------------------------------------------------
// formatting helpers

std::string fmt_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_fixed(double v, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string fmt_compact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Minimal ordered JSON writer. nlohmann would re-sort keys and pick its own
// float precision; the report contract wants a stable field order and 12
// significant digits.
class JsonWriter {
public:
    std::string take() { return std::move(out_); }

    void beginObject() { open('{'); }
    void endObject() { close('}'); }
    void beginArray() { open('['); }
    void endArray() { close(']'); }

    void key(std::string_view k) {
        comma();
        string(k);
        out_ += ": ";
        pendingValue_ = true;
    }

    void value(std::string_view s) { comma(); string(s); }
    void value(const char* s) { value(std::string_view{s}); }
    void value(bool b) { comma(); out_ += b ? "true" : "false"; }
    void value(std::uint64_t n) { comma(); out_ += std::to_string(n); }
    void value(int n) { comma(); out_ += std::to_string(n); }
    void value(double v) {
        comma();
        if (std::isfinite(v)) out_ += fmt_sig12(v);
        else out_ += "null";
    }
    void null() { comma(); out_ += "null"; }

private:
    void open(char c) {
        comma();
        out_.push_back(c);
        needComma_.push_back(false);
    }
    void close(char c) {
        needComma_.pop_back();
        out_.push_back(c);
        if (!needComma_.empty()) needComma_.back() = true;
    }
    void comma() {
        if (pendingValue_) {
            pendingValue_ = false;
            return;
        }
        if (!needComma_.empty()) {
            if (needComma_.back()) out_ += ", ";
            needComma_.back() = true;
        }
    }
    void string(std::string_view s) {
        out_.push_back('"');
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\r': out_ += "\\r"; break;
                case '\t': out_ += "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_.push_back(c);
                    }
            }
        }
        out_.push_back('"');
    }

    std::string out_;
    std::vector<bool> needComma_;
    bool pendingValue_ = false;
};

// ---------------------------------------------------------------------------
// panel geometry

constexpr double kPanelW = 360.0;
constexpr double kPanelH = 260.0;
constexpr double kMarginL = 52.0;
constexpr double kMarginR = 64.0;
constexpr double kMarginT = 26.0;
constexpr double kMarginB = 30.0;

struct Frame {
    double x0 = kMarginL;
    double x1 = kPanelW - kMarginR;
    double y0 = kMarginT;                // top
    double y1 = kPanelH - kMarginB;      // bottom

    double mapX(double t, double tmin, double tmax) const {
        if (tmax == tmin) return (x0 + x1) / 2.0;
        return x0 + (t - tmin) / (tmax - tmin) * (x1 - x0);
    }
    double mapY(double v, double vmin, double vmax) const {
        if (vmax == vmin) return (y0 + y1) / 2.0;
        return y1 - (v - vmin) / (vmax - vmin) * (y1 - y0);
    }
};

std::string svg_open(double width, double height) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_compact(width) +
           "\" height=\"" + fmt_compact(height) + "\" viewBox=\"0 0 " + fmt_compact(width) + " " +
           fmt_compact(height) + "\">\n";
    return out;
}

void add_text(std::string& out, double x, double y, const std::string& text,
              const std::string& anchor, const std::string& fill, double size = 10.0,
              bool bold = false) {
    out += "<text x=\"" + fmt_fixed(x, 2) + "\" y=\"" + fmt_fixed(y, 2) +
           "\" font-family=\"sans-serif\" font-size=\"" + fmt_compact(size) + "\"";
    if (bold) out += " font-weight=\"bold\"";
    out += " text-anchor=\"" + anchor + "\" fill=\"" + fill + "\">" + xml_escape(text) +
           "</text>\n";
}

void add_line(std::string& out, double x1, double y1, double x2, double y2,
              const std::string& stroke, double width = 1.0) {
    out += "<line x1=\"" + fmt_fixed(x1, 2) + "\" y1=\"" + fmt_fixed(y1, 2) + "\" x2=\"" +
           fmt_fixed(x2, 2) + "\" y2=\"" + fmt_fixed(y2, 2) + "\" stroke=\"" + stroke +
           "\" stroke-width=\"" + fmt_compact(width) + "\"/>\n";
}

}  // namespace

// ---------------------------------------------------------------------------

ReportBundle build_report_bundle(const SessionReturnSeries& srs, const WealthCurvePair& curves,
                                 const Thresholds& thresholds, const ReportMetadata& metadata) {
    ReportBundle bundle;
    bundle.metadata = metadata;
    bundle.curves = curves;
    bundle.metrics = classify_suspicion(srs, curves, thresholds);

    auto overnight = srs.definedOvernight();
    auto intraday = srs.definedIntraday();
    bundle.overnightHistogram =
        build_histogram({overnight.data(), overnight.size()}, default_return_edges());
    bundle.intradayHistogram =
        build_histogram({intraday.data(), intraday.size()}, default_return_edges());
    try {
        bundle.variance = variance_split(srs);
    } catch (const DegenerateError&) {
        bundle.variance = std::nullopt;
    }
    return bundle;
}

std::string emit_report_json(const ReportBundle& bundle) {
    const auto& md = bundle.metadata;
    JsonWriter w;
    w.beginObject();
    w.key("schemaVersion"); w.value(kReportSchemaVersion);
    w.key("instrumentId"); w.value(md.instrumentId);
    w.key("policy"); w.value(to_string(md.policy));
    w.key("dateRange");
    w.beginObject();
    w.key("start"); w.value(md.dateRange.start.toString());
    w.key("end"); w.value(md.dateRange.end.toString());
    w.endObject();
    w.key("days"); w.value(bundle.curves.overnight.dates.size());
    w.key("dataProvenance"); w.value(md.dataProvenance);
    w.key("toolVersion"); w.value(md.toolVersion);
    w.key("seed"); w.value(md.seed);
    w.key("finalOvernightWealth");
    w.value(bundle.curves.overnight.values.empty() ? 1.0 : bundle.curves.overnight.values.back());
    w.key("finalIntradayWealth");
    w.value(bundle.curves.intraday.values.empty() ? 1.0 : bundle.curves.intraday.values.back());

    w.key("metrics");
    w.beginObject();
    w.key("cumOvernight"); w.value(bundle.metrics.cumOvernight);
    w.key("cumIntraday"); w.value(bundle.metrics.cumIntraday);
    w.key("logWealthGap"); w.value(bundle.metrics.logWealthGap);
    w.key("straightnessOvernight");
    if (bundle.metrics.straightnessOvernight) w.value(*bundle.metrics.straightnessOvernight);
    else w.null();
    w.key("straightnessIntraday");
    if (bundle.metrics.straightnessIntraday) w.value(*bundle.metrics.straightnessIntraday);
    else w.null();
    w.key("pValue"); w.value(bundle.metrics.pValue);
    w.key("flagged"); w.value(bundle.metrics.flagged);
    w.endObject();

    w.key("variance");
    if (bundle.variance) {
        w.beginObject();
        w.key("varOvernight"); w.value(bundle.variance->varOvernight);
        w.key("varIntraday"); w.value(bundle.variance->varIntraday);
        w.key("intradayFraction"); w.value(bundle.variance->intradayFraction);
        w.endObject();
    } else {
        w.null();
    }

    w.key("histograms");
    w.beginObject();
    w.key("edges");
    w.beginArray();
    for (double e : bundle.overnightHistogram.edges) w.value(e);
    w.endArray();
    w.key("overnightCounts");
    w.beginArray();
    for (auto c : bundle.overnightHistogram.counts) w.value(c);
    w.endArray();
    w.key("intradayCounts");
    w.beginArray();
    for (auto c : bundle.intradayHistogram.counts) w.value(c);
    w.endArray();
    w.endObject();

    w.endObject();
    std::string out = w.take();
    out.push_back('\n');
    return out;
}

std::string emit_series_csv(const SessionReturnSeries& srs, const WealthCurvePair& curves) {
    const std::size_t n = srs.size();
    if (n == 0) throw AlignmentError("empty return series");
    if (srs.overnight.size() != n || srs.intraday.size() != n)
        throw AlignmentError("return streams misaligned with dates");
    if (curves.overnight.values.size() != n || curves.intraday.values.size() != n)
        throw AlignmentError("wealth curves misaligned with return series");

    std::string out = "Date,OvernightReturn,IntradayReturn,OvernightWealth,IntradayWealth\n";
    for (std::size_t t = 0; t < n; ++t) {
        out += srs.dates[t].toString();
        out.push_back(',');
        if (t > 0) out += fmt_sig12(srs.overnight[t]);
        out.push_back(',');
        out += fmt_sig12(srs.intraday[t]);
        out.push_back(',');
        out += fmt_sig12(curves.overnight.values[t]);
        out.push_back(',');
        out += fmt_sig12(curves.intraday.values[t]);
        out.push_back('\n');
    }
    return out;
}

// ---------------------------------------------------------------------------
// SVG rendering

namespace {

struct TransformedCurve {
    std::vector<double> x;  // date serials
    std::vector<double> y;  // plotted quantity (log10 wealth, or return)
};

TransformedCurve transform_curve(const WealthCurve& curve, AxisScale scale) {
    TransformedCurve out;
    out.x.reserve(curve.values.size());
    out.y.reserve(curve.values.size());
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        double v = curve.values[i];
        if (scale == AxisScale::Log) {
            if (!(v > 0.0))
                throw DomainError("log-scale panel requires positive wealth values");
            out.y.push_back(std::log10(v));
        } else {
            out.y.push_back(v - 1.0);  // cumulative return
        }
        out.x.push_back(static_cast<double>(curve.dates[i].daysSinceEpoch()));
    }
    return out;
}

void add_polyline(std::string& out, const Frame& f, const TransformedCurve& c, double tmin,
                  double tmax, double vmin, double vmax, const std::string& color) {
    out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
        if (i) out.push_back(' ');
        out += fmt_fixed(f.mapX(c.x[i], tmin, tmax), 2);
        out.push_back(',');
        out += fmt_fixed(f.mapY(c.y[i], vmin, vmax), 2);
    }
    out += "\"/>\n";
}

std::string endpoint_label(double wealth, AxisScale scale) {
    if (scale == AxisScale::Log) return fmt_fixed(wealth, 2);
    return fmt_fixed((wealth - 1.0) * 100.0, 2) + "%";
}

}  // namespace

std::string render_wealth_panel_svg(const WealthCurvePair& curves, const PanelSpec& spec) {
    if (curves.overnight.values.empty() || curves.intraday.values.empty())
        throw DomainError("cannot render empty curves");
    if (curves.overnight.dates.size() != curves.overnight.values.size() ||
        curves.intraday.dates.size() != curves.intraday.values.size())
        throw AlignmentError("curve dates and values misaligned");

    TransformedCurve on = transform_curve(curves.overnight, spec.scale);
    TransformedCurve in = transform_curve(curves.intraday, spec.scale);

    double tmin = std::min(on.x.front(), in.x.front());
    double tmax = std::max(on.x.back(), in.x.back());
    double vmin = std::min(*std::min_element(on.y.begin(), on.y.end()),
                           *std::min_element(in.y.begin(), in.y.end()));
    double vmax = std::max(*std::max_element(on.y.begin(), on.y.end()),
                           *std::max_element(in.y.begin(), in.y.end()));
    if (spec.scale == AxisScale::Linear && spec.yFloor) vmin = std::min(*spec.yFloor, vmin);
    if (vmax == vmin) {  // flat curves: open up a symmetric band
        vmax += 0.5;
        vmin -= 0.5;
    } else {
        double pad = (vmax - vmin) * 0.05;
        vmax += pad;
        if (!(spec.scale == AxisScale::Linear && spec.yFloor && vmin == *spec.yFloor)) vmin -= pad;
    }

    Frame f;
    std::string out = svg_open(kPanelW, kPanelH);
    add_text(out, kPanelW / 2.0, kMarginT - 10.0, spec.title, "middle", "black", 11.0, true);

    // frame
    add_line(out, f.x0, f.y0, f.x0, f.y1, "black");
    add_line(out, f.x0, f.y1, f.x1, f.y1, "black");

    // y ticks
    if (spec.scale == AxisScale::Log) {
        for (int k = static_cast<int>(std::ceil(vmin)); k <= static_cast<int>(std::floor(vmax));
             ++k) {
            double y = f.mapY(static_cast<double>(k), vmin, vmax);
            add_line(out, f.x0 - 3.0, y, f.x0, y, "black");
            add_text(out, f.x0 - 5.0, y + 3.0, fmt_compact(std::pow(10.0, k)), "end", "black",
                     9.0);
        }
    } else {
        for (int k = 0; k <= 4; ++k) {
            double v = vmin + (vmax - vmin) * k / 4.0;
            double y = f.mapY(v, vmin, vmax);
            add_line(out, f.x0 - 3.0, y, f.x0, y, "black");
            add_text(out, f.x0 - 5.0, y + 3.0, fmt_fixed(v * 100.0, 0) + "%", "end", "black", 9.0);
        }
    }

    // x labels: first and last date
    add_text(out, f.x0, f.y1 + 14.0, curves.overnight.dates.front().toString(), "start", "black",
             9.0);
    add_text(out, f.x1, f.y1 + 14.0, curves.overnight.dates.back().toString(), "end", "black",
             9.0);

    add_polyline(out, f, on, tmin, tmax, vmin, vmax, spec.overnightColor);
    add_polyline(out, f, in, tmin, tmax, vmin, vmax, spec.intradayColor);

    if (spec.markEndpoints) {
        double yOn = f.mapY(on.y.back(), vmin, vmax);
        double yIn = f.mapY(in.y.back(), vmin, vmax);
        if (std::abs(yOn - yIn) < 12.0) {  // keep the labels from colliding
            double mid = (yOn + yIn) / 2.0;
            bool overnightAbove = yOn <= yIn;
            yOn = overnightAbove ? mid - 6.0 : mid + 6.0;
            yIn = overnightAbove ? mid + 6.0 : mid - 6.0;
        }
        add_text(out, f.x1 + 4.0, yOn + 3.0, endpoint_label(curves.overnight.values.back(),
                 spec.scale), "start", spec.overnightColor, 10.0, true);
        add_text(out, f.x1 + 4.0, yIn + 3.0, endpoint_label(curves.intraday.values.back(),
                 spec.scale), "start", spec.intradayColor, 10.0, true);
    }

    out += "</svg>\n";
    return out;
}

std::string render_grid_svg(const std::vector<std::string>& panels, int columns) {
    if (panels.empty()) throw DomainError("grid needs at least one panel");
    if (columns < 1) throw DomainError("grid needs at least one column");

    const int n = static_cast<int>(panels.size());
    const int cols = std::min(columns, n);
    const int rows = (n + columns - 1) / columns;

    std::string out = svg_open(cols * kPanelW, rows * kPanelH);
    for (int i = 0; i < n; ++i) {
        int row = i / columns;
        int col = i % columns;
        std::string_view doc = panels[static_cast<std::size_t>(i)];

        // Drop the XML declaration and re-anchor the root element at its cell.
        std::size_t start = doc.find("<svg");
        if (start == std::string_view::npos)
            throw DomainError("panel " + std::to_string(i) + " is not an SVG document");
        std::string cell{doc.substr(start)};
        std::string anchor = "<svg x=\"" + fmt_compact(col * kPanelW) + "\" y=\"" +
                             fmt_compact(row * kPanelH) + "\"";
        cell.replace(0, 4, anchor);
        out += cell;
    }
    out += "</svg>\n";
    return out;
}

std::string render_histogram_svg(const Histogram& histA, const Histogram& histB,
                                 const std::pair<std::string, std::string>& labels) {
    if (histA.edges != histB.edges) throw AlignmentError("histograms have different edges");
    if (histA.counts.empty()) throw DomainError("empty histogram");

    const std::string colorA = "blue";
    const std::string colorB = "green";

    std::uint64_t maxCount = 1;
    for (auto c : histA.counts) maxCount = std::max(maxCount, c);
    for (auto c : histB.counts) maxCount = std::max(maxCount, c);

    Frame f;
    const double emin = histA.edges.front();
    const double emax = histA.edges.back();

    auto step_path = [&](const Histogram& h, const std::string& color) {
        std::string path = "<path fill=\"none\" stroke=\"" + color +
                           "\" stroke-width=\"1.2\" d=\"";
        path += "M" + fmt_fixed(f.mapX(h.edges.front(), emin, emax), 2) + "," +
                fmt_fixed(f.y1, 2);
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            double y = f.mapY(static_cast<double>(h.counts[i]), 0.0, static_cast<double>(maxCount));
            path += " V" + fmt_fixed(y, 2);
            path += " H" + fmt_fixed(f.mapX(h.edges[i + 1], emin, emax), 2);
        }
        path += " V" + fmt_fixed(f.y1, 2);
        path += "\"/>\n";
        return path;
    };

    std::string out = svg_open(kPanelW, kPanelH);
    add_line(out, f.x0, f.y0, f.x0, f.y1, "black");
    add_line(out, f.x0, f.y1, f.x1, f.y1, "black");
    add_text(out, f.x0, f.y1 + 14.0, fmt_compact(emin), "start", "black", 9.0);
    add_text(out, f.x1, f.y1 + 14.0, fmt_compact(emax), "end", "black", 9.0);
    if (emin < 0.0 && emax > 0.0)
        add_text(out, f.mapX(0.0, emin, emax), f.y1 + 14.0, "0", "middle", "black", 9.0);
    add_text(out, f.x0 - 5.0, f.y0 + 3.0, std::to_string(maxCount), "end", "black", 9.0);

    out += step_path(histA, colorA);
    out += step_path(histB, colorB);

    // legend, top right
    double lx = f.x1 - 4.0, ly = f.y0 + 6.0;
    add_text(out, lx, ly + 3.0, labels.first, "end", colorA, 9.0);
    add_text(out, lx, ly + 17.0, labels.second, "end", colorB, 9.0);

    out += "</svg>\n";
    return out;
}

}  // namespace sessionsplit
