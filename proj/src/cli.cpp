#include "sessionsplit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "sessionsplit/errors.hpp"
#include "sessionsplit/fetch.hpp"
#include "sessionsplit/ingest.hpp"
#include "sessionsplit/nullmodel.hpp"
#include "sessionsplit/report.hpp"

namespace fs = std::filesystem;

namespace sessionsplit {

namespace {

std::string fmt_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

// Runs fn(0..n-1) on up to `jobs` threads. Callers handle their own
// exceptions inside fn; slots keep the output order independent of timing.
void parallel_for(int jobs, std::size_t n, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// configuration

struct CliOptions {
    std::string configPath;
    std::vector<std::string> symbols;
    std::string symbol;
    std::string start, end;
    std::string policy;
    std::string dataDir, outputDir, endpointTemplate;
    double alpha = 0.0, minStraightness = 0.0, timeoutSeconds = 0.0;
    int nPermutations = 0, jobs = 0, columns = 0;
    std::uint64_t seed = 0;
    bool offline = false, rawSplits = false;

    // simulate
    int trials = 1000, days = 252;
    double sigmaOvernight = 0.006, sigmaIntraday = 0.009;
    double startPrice = 100.0;
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
    auto text = read_file(path);
    if (!text) throw DataError("cannot read config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(*text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("config file " + path + ": " + e.what());
    }
    if (j.contains("instruments")) cfg.instruments = j["instruments"].get<std::vector<std::string>>();
    if (j.contains("start") || j.contains("end")) {
        if (!(j.contains("start") && j.contains("end")))
            throw DataError("config needs both start and end, or neither");
        cfg.dateRange = DateRange{Date::parse(j["start"].get<std::string>()),
                                  Date::parse(j["end"].get<std::string>())};
    }
    if (j.contains("policy")) cfg.policy = dividend_policy_from_string(j["policy"].get<std::string>());
    if (j.contains("alpha")) cfg.thresholds.alpha = j["alpha"].get<double>();
    if (j.contains("min_straightness")) cfg.thresholds.minStraightness = j["min_straightness"].get<double>();
    if (j.contains("n_permutations")) cfg.thresholds.nPermutations = j["n_permutations"].get<int>();
    if (j.contains("seed")) cfg.thresholds.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("data_dir")) cfg.dataDir = j["data_dir"].get<std::string>();
    if (j.contains("output_dir")) cfg.outputDir = j["output_dir"].get<std::string>();
    if (j.contains("endpoint_template")) cfg.endpointTemplate = j["endpoint_template"].get<std::string>();
    if (j.contains("offline")) cfg.offline = j["offline"].get<bool>();
    if (j.contains("raw_splits")) cfg.rawSplits = j["raw_splits"].get<bool>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
    if (j.contains("columns")) cfg.columns = j["columns"].get<int>();
    if (j.contains("timeout_seconds")) cfg.timeoutSeconds = j["timeout_seconds"].get<double>();
}

// ---------------------------------------------------------------------------
// shared pipeline pieces

struct Loaded {
    PriceSeries series;
    std::size_t skippedRows = 0;
    std::string provenance;
};

Loaded load_series(const RunConfig& cfg, const std::string& symbol, std::ostream& err) {
    fs::path dir = fs::path(cfg.dataDir) / symbol;
    auto pricesText = read_file(dir / "prices.csv");
    if (!pricesText)
        throw DataError("no price data for " + symbol + " (" + (dir / "prices.csv").string() +
                        ")");
    auto divText = read_file(dir / "dividends.csv").value_or("");
    auto splText = read_file(dir / "splits.csv").value_or("");

    PriceParseResult parsed = parse_price_csv(*pricesText);
    parsed.series.instrumentId = symbol;
    parsed.series.events = parse_events_csv(divText, splText);
    if (!parsed.skipped.empty()) {
        err << symbol << ": skipped " << parsed.skipped.size() << " row(s) (first: line "
            << parsed.skipped.front().line << ", " << parsed.skipped.front().reason << ")\n";
    }

    Loaded loaded;
    loaded.series = cfg.rawSplits ? back_adjust_splits(parsed.series) : std::move(parsed.series);
    loaded.skippedRows = parsed.skipped.size();
    if (cfg.dateRange) loaded.series = clip_to_range(loaded.series, *cfg.dateRange);

    auto violations = validate_series(loaded.series);
    if (!violations.empty()) {
        std::string msg = symbol + ": " + std::to_string(violations.size()) +
                          " validation violation(s), first: " + violations.front().rule + " on " +
                          violations.front().date.toString();
        throw DataError(msg);
    }

    loaded.provenance = "files:" + dir.string();
    if (auto meta = read_file(dir / "fetch.meta.json")) {
        try {
            auto j = nlohmann::json::parse(*meta);
            if (j.contains("retrievedAtUtc"))
                loaded.provenance = "fetched " + j["retrievedAtUtc"].get<std::string>() + " (" +
                                    dir.string() + ")";
        } catch (const nlohmann::json::exception&) {
            // stale or foreign meta file; keep the directory provenance
        }
    }
    return loaded;
}

ReportBundle make_bundle(const RunConfig& cfg, const std::string& symbol, const Loaded& loaded) {
    SessionReturnSeries srs = decompose_series(loaded.series, cfg.policy);
    WealthCurvePair curves = wealth_curves(srs);
    ReportMetadata md;
    md.instrumentId = symbol;
    md.policy = cfg.policy;
    md.dateRange = DateRange{srs.dates.front(), srs.dates.back()};
    md.dataProvenance = loaded.provenance;
    md.seed = cfg.thresholds.seed;
    return build_report_bundle(srs, curves, cfg.thresholds, md);
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_fetch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.dateRange) throw DataError("fetch needs --start and --end");
    FetchOptions options;
    options.endpointTemplate = cfg.endpointTemplate;
    options.offline = cfg.offline;
    options.timeoutSeconds = cfg.timeoutSeconds;

    std::vector<std::string> errors(cfg.instruments.size());
    parallel_for(cfg.jobs, cfg.instruments.size(), [&](std::size_t i) {
        const std::string& symbol = cfg.instruments[i];
        try {
            FetchResult result = fetch_history(symbol, *cfg.dateRange, options);
            fs::path dir = fs::path(cfg.dataDir) / symbol;
            write_file(dir / "prices.csv", result.prices);
            write_file(dir / "dividends.csv", result.dividends);
            write_file(dir / "splits.csv", result.splits);
            nlohmann::json meta;
            meta["endpointTemplate"] = cfg.endpointTemplate;
            meta["retrievedAtUtc"] = result.retrievedAtUtc;
            write_file(dir / "fetch.meta.json", meta.dump() + "\n");
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    int failures = 0;
    for (std::size_t i = 0; i < cfg.instruments.size(); ++i) {
        if (errors[i].empty()) {
            out << "fetched " << cfg.instruments[i] << " -> " << cfg.dataDir << "/"
                << cfg.instruments[i] << "\n";
        } else {
            err << cfg.instruments[i] << ": " << errors[i] << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

int cmd_decompose(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    for (const auto& symbol : cfg.instruments) {
        Loaded loaded = load_series(cfg, symbol, err);
        SessionReturnSeries srs = decompose_series(loaded.series, cfg.policy);
        WealthCurvePair curves = wealth_curves(srs);
        fs::path path = fs::path(cfg.outputDir) / (symbol + ".series.csv");
        write_file(path, emit_series_csv(srs, curves));
        out << "wrote " << path.string() << "\n";
    }
    return 0;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::string& symbol = cfg.instruments.front();
    Loaded loaded = load_series(cfg, symbol, err);
    ReportBundle bundle = make_bundle(cfg, symbol, loaded);

    fs::path jsonPath = fs::path(cfg.outputDir) / (symbol + ".report.json");
    write_file(jsonPath, emit_report_json(bundle));

    PanelSpec spec;
    spec.title = symbol;
    fs::path panelPath = fs::path(cfg.outputDir) / (symbol + ".panel.svg");
    write_file(panelPath, render_wealth_panel_svg(bundle.curves, spec));

    fs::path histPath = fs::path(cfg.outputDir) / (symbol + ".histogram.svg");
    write_file(histPath, render_histogram_svg(bundle.overnightHistogram,
                                              bundle.intradayHistogram,
                                              {"overnight", "intraday"}));

    out << "wrote " << jsonPath.string() << "\n";
    out << "wrote " << panelPath.string() << "\n";
    out << "wrote " << histPath.string() << "\n";
    return 0;
}

struct ScanRow {
    std::string symbol;
    bool ok = false;
    SuspicionMetrics metrics;
    std::optional<VarianceStats> variance;
    std::string error;
};

std::string csv_safe(std::string text) {
    for (char& c : text)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return text;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<ScanRow> rows(cfg.instruments.size());
    parallel_for(cfg.jobs, cfg.instruments.size(), [&](std::size_t i) {
        ScanRow& row = rows[i];
        row.symbol = cfg.instruments[i];
        try {
            std::ostringstream localErr;
            Loaded loaded = load_series(cfg, row.symbol, localErr);
            ReportBundle bundle = make_bundle(cfg, row.symbol, loaded);
            write_file(fs::path(cfg.outputDir) / (row.symbol + ".report.json"),
                       emit_report_json(bundle));
            row.metrics = bundle.metrics;
            row.variance = bundle.variance;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });

    // pValue ascending, gap descending, then symbol; failures sink to the end
    std::stable_sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) {
        double pa = a.ok ? a.metrics.pValue : std::numeric_limits<double>::infinity();
        double pb = b.ok ? b.metrics.pValue : std::numeric_limits<double>::infinity();
        if (pa != pb) return pa < pb;
        double ga = a.ok ? a.metrics.logWealthGap : 0.0;
        double gb = b.ok ? b.metrics.logWealthGap : 0.0;
        if (ga != gb) return ga > gb;
        return a.symbol < b.symbol;
    });

    std::string csv =
        "Symbol,PValue,LogWealthGap,CumOvernightReturn,CumIntradayReturn,"
        "StraightnessOvernight,StraightnessIntraday,IntradayVarianceFraction,Flagged,Error\n";
    for (const auto& row : rows) {
        csv += row.symbol;
        csv.push_back(',');
        if (row.ok) {
            const auto& m = row.metrics;
            csv += fmt_sig12(m.pValue);
            csv.push_back(',');
            csv += fmt_sig12(m.logWealthGap);
            csv.push_back(',');
            csv += fmt_sig12(m.cumOvernight);
            csv.push_back(',');
            csv += fmt_sig12(m.cumIntraday);
            csv.push_back(',');
            if (m.straightnessOvernight) csv += fmt_sig12(*m.straightnessOvernight);
            csv.push_back(',');
            if (m.straightnessIntraday) csv += fmt_sig12(*m.straightnessIntraday);
            csv.push_back(',');
            if (row.variance) csv += fmt_sig12(row.variance->intradayFraction);
            csv.push_back(',');
            csv += m.flagged ? "true" : "false";
            csv.push_back(',');
        } else {
            csv += ",,,,,,,,";
            csv += csv_safe(row.error);
        }
        csv.push_back('\n');
    }
    fs::path summaryPath = fs::path(cfg.outputDir) / "scan_summary.csv";
    write_file(summaryPath, csv);
    out << "wrote " << summaryPath.string() << "\n";

    for (const auto& row : rows)
        if (!row.ok) err << row.symbol << ": " << row.error << "\n";
    return 0;
}

int cmd_grid(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<std::string> panels;
    panels.reserve(cfg.instruments.size());
    for (const auto& symbol : cfg.instruments) {
        Loaded loaded = load_series(cfg, symbol, err);
        SessionReturnSeries srs = decompose_series(loaded.series, cfg.policy);
        WealthCurvePair curves = wealth_curves(srs);
        PanelSpec spec;
        spec.title = symbol;
        panels.push_back(render_wealth_panel_svg(curves, spec));
    }
    fs::path path = fs::path(cfg.outputDir) / "grid.svg";
    write_file(path, render_grid_svg(panels, cfg.columns));
    out << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const CliOptions& opts, std::ostream& out) {
    GbmParams params;
    params.nDays = opts.days;
    params.startPrice = opts.startPrice;
    params.sigmaOvernight = opts.sigmaOvernight;
    params.sigmaIntraday = opts.sigmaIntraday;
    params.seed = cfg.thresholds.seed;
    CalibrationResult result = calibrate_false_positive_rate(params, opts.trials, cfg.thresholds);

    std::string json = "{";
    json += "\"schemaVersion\": 1";
    json += ", \"toolVersion\": \"" + std::string(kToolVersion) + "\"";
    json += ", \"trials\": " + std::to_string(result.trials);
    json += ", \"days\": " + std::to_string(params.nDays);
    json += ", \"sigmaOvernight\": " + fmt_sig12(params.sigmaOvernight);
    json += ", \"sigmaIntraday\": " + fmt_sig12(params.sigmaIntraday);
    json += ", \"alpha\": " + fmt_sig12(cfg.thresholds.alpha);
    json += ", \"minStraightness\": " + fmt_sig12(cfg.thresholds.minStraightness);
    json += ", \"nPermutations\": " + std::to_string(cfg.thresholds.nPermutations);
    json += ", \"seed\": " + std::to_string(cfg.thresholds.seed);
    json += ", \"flaggedCount\": " + std::to_string(result.flagged);
    json += ", \"flaggedFraction\": " + fmt_sig12(result.flaggedFraction());
    json += "}\n";

    fs::path path = fs::path(cfg.outputDir) / "simulation.report.json";
    write_file(path, json);
    out << "flagged fraction: " << fmt_sig12(result.flaggedFraction()) << "\n";
    out << "wrote " << path.string() << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Overnight/intraday session return decomposition and suspicion screening",
                 "session-split"};
    app.fallthrough();

    CliOptions opts;
    auto* optConfig = app.add_option("--config", opts.configPath, "JSON config file with defaults");
    auto* optData = app.add_option("--data-dir", opts.dataDir, "directory with per-symbol CSVs");
    auto* optOut = app.add_option("--output-dir", opts.outputDir, "directory for results");
    auto* optOffline = app.add_flag("--offline", opts.offline, "never touch the network");
    auto* optJobs = app.add_option("--jobs", opts.jobs, "parallel instrument pipelines")
                        ->check(CLI::PositiveNumber);
    auto* optPolicy = app.add_option("--policy", opts.policy, "dividend policy: reinvest|drop");
    auto* optStart = app.add_option("--start", opts.start, "range start, YYYY-MM-DD (inclusive)");
    auto* optEnd = app.add_option("--end", opts.end, "range end, YYYY-MM-DD (inclusive)");
    auto* optAlpha = app.add_option("--alpha", opts.alpha, "significance level in (0,1]");
    auto* optStraight =
        app.add_option("--min-straightness", opts.minStraightness, "R^2 floor in [0,1]");
    auto* optPerms = app.add_option("--permutations", opts.nPermutations,
                                    "permutation count for the sign-flip test")
                         ->check(CLI::PositiveNumber);
    auto* optSeed = app.add_option("--seed", opts.seed, "random seed");
    auto* optTemplate = app.add_option("--endpoint-template", opts.endpointTemplate,
                                       "fetch URL with {symbol} {start} {end} {events}");
    auto* optTimeout = app.add_option("--timeout", opts.timeoutSeconds, "fetch budget, seconds");
    auto* optRawSplits = app.add_flag("--raw-splits", opts.rawSplits,
                                      "back-adjust splits (for feeds that are not pre-adjusted)");

    auto addSymbols = [&](CLI::App* cmd) {
        cmd->add_option("--symbols", opts.symbols, "instrument symbols")->delimiter(',');
    };

    auto* cmdFetch = app.add_subcommand("fetch", "download raw price/dividend/split documents");
    addSymbols(cmdFetch);
    auto* cmdDecompose =
        app.add_subcommand("decompose", "write per-day session returns and wealth");
    addSymbols(cmdDecompose);
    auto* cmdReport = app.add_subcommand("report", "full pipeline for one instrument");
    cmdReport->add_option("--symbol", opts.symbol, "instrument symbol");
    auto* cmdScan = app.add_subcommand("scan", "full pipeline for many instruments + summary");
    addSymbols(cmdScan);
    auto* cmdGrid = app.add_subcommand("grid", "small-multiples wealth panel grid");
    addSymbols(cmdGrid);
    auto* optColumns = cmdGrid->add_option("--columns", opts.columns, "grid columns")
                           ->check(CLI::PositiveNumber);
    auto* cmdSim = app.add_subcommand("simulate", "null-model false-positive calibration");
    cmdSim->add_option("--trials", opts.trials, "number of simulations");
    cmdSim->add_option("--days", opts.days, "days per simulated series");
    cmdSim->add_option("--sigma-overnight", opts.sigmaOvernight, "overnight log-return stdev");
    cmdSim->add_option("--sigma-intraday", opts.sigmaIntraday, "intraday log-return stdev");
    cmdSim->add_option("--start-price", opts.startPrice, "simulated start price");

    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion& e) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        RunConfig cfg;
        if (optConfig->count()) apply_config_file(cfg, opts.configPath);
        if (optData->count()) cfg.dataDir = opts.dataDir;
        if (optOut->count()) cfg.outputDir = opts.outputDir;
        if (optOffline->count()) cfg.offline = true;
        if (optJobs->count()) cfg.jobs = opts.jobs;
        if (optPolicy->count()) cfg.policy = dividend_policy_from_string(opts.policy);
        if (optAlpha->count()) cfg.thresholds.alpha = opts.alpha;
        if (optStraight->count()) cfg.thresholds.minStraightness = opts.minStraightness;
        if (optPerms->count()) cfg.thresholds.nPermutations = opts.nPermutations;
        if (optSeed->count()) cfg.thresholds.seed = opts.seed;
        if (optTemplate->count()) cfg.endpointTemplate = opts.endpointTemplate;
        if (optTimeout->count()) cfg.timeoutSeconds = opts.timeoutSeconds;
        if (optRawSplits->count()) cfg.rawSplits = true;
        if (optColumns->count()) cfg.columns = opts.columns;
        if (!opts.symbols.empty()) cfg.instruments = opts.symbols;
        if (!opts.symbol.empty()) cfg.instruments = {opts.symbol};

        if (optStart->count() || optEnd->count()) {
            if (!(optStart->count() && optEnd->count()))
                throw CLI::ValidationError("--start and --end must be given together");
            auto start = Date::tryParse(opts.start);
            auto end = Date::tryParse(opts.end);
            if (!start || !end)
                throw CLI::ValidationError("dates must be YYYY-MM-DD");
            cfg.dateRange = DateRange{*start, *end};
        }
        if (cfg.dateRange && !(cfg.dateRange->start < cfg.dateRange->end))
            throw CLI::ValidationError("--start must precede --end");

        if (const char* env = std::getenv("SESSION_SPLIT_OFFLINE"); env && env == std::string("1"))
            cfg.offline = true;

        const bool needsSymbols =
            cmdFetch->parsed() || cmdDecompose->parsed() || cmdReport->parsed() ||
            cmdScan->parsed() || cmdGrid->parsed();
        if (needsSymbols && cfg.instruments.empty())
            throw CLI::ValidationError("no instruments given (use --symbol/--symbols or config)");

        if (cmdFetch->parsed()) return cmd_fetch(cfg, out, err);
        if (cmdDecompose->parsed()) return cmd_decompose(cfg, out, err);
        if (cmdReport->parsed()) return cmd_report(cfg, out, err);
        if (cmdScan->parsed()) return cmd_scan(cfg, out, err);
        if (cmdGrid->parsed()) return cmd_grid(cfg, out, err);
        if (cmdSim->parsed()) return cmd_simulate(cfg, opts, out);
        err << "no subcommand\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace sessionsplit
