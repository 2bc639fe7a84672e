#pragma once

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "sessionsplit/prices.hpp"

namespace testutil {

inline std::filesystem::path fixture_dir() { return std::filesystem::path(FIXTURE_DIR); }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

// Fresh scratch directory per test case, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("sessionsplit_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline sessionsplit::Date day(int offset) {
    return sessionsplit::Date::fromYmd(2020, 1, 1).plusDays(offset);
}

// Random positive price series: geometric steps keep everything valid.
inline sessionsplit::PriceSeries random_series(std::mt19937_64& rng, int nDays,
                                               bool withDividends) {
    std::normal_distribution<double> step(0.0, 0.02);
    std::uniform_real_distribution<double> divAmount(0.0, 2.0);
    std::uniform_int_distribution<int> divEvery(15, 40);

    sessionsplit::PriceSeries series;
    series.instrumentId = "RAND";
    double close = 100.0;
    int nextDiv = withDividends ? divEvery(rng) : -1;
    for (int t = 0; t < nDays; ++t) {
        sessionsplit::DailyBar bar;
        bar.date = day(t);
        bar.open = t == 0 ? close : close * std::exp(step(rng));
        bar.close = bar.open * std::exp(step(rng));
        series.bars.push_back(bar);
        close = bar.close;
        if (withDividends && t == nextDiv) {
            series.events.push_back({bar.date, divAmount(rng), 1.0});
            nextDiv += divEvery(rng);
        }
    }
    return series;
}

// Lightweight XML well-formedness scan: balanced tags, quoted attributes,
// single root. Enough to catch broken markup without an XML library.
inline bool xml_well_formed(const std::string& doc) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    int roots = 0;
    auto fail = [](const char*) { return false; };
    // optional declaration
    if (doc.rfind("<?xml", 0) == 0) {
        i = doc.find("?>");
        if (i == std::string::npos) return fail("unterminated declaration");
        i += 2;
    }
    while (i < doc.size()) {
        char c = doc[i];
        if (c != '<') {
            if (c == '>') return fail("stray >");
            ++i;
            continue;
        }
        std::size_t close = i;
        bool inQuote = false;
        while (close < doc.size() && (doc[close] != '>' || inQuote)) {
            if (doc[close] == '"') inQuote = !inQuote;
            ++close;
        }
        if (close >= doc.size()) return fail("unterminated tag");
        std::string tag = doc.substr(i + 1, close - i - 1);
        if (tag.empty()) return fail("empty tag");
        if (tag[0] == '/') {
            if (stack.empty()) return fail("close without open");
            std::string name = tag.substr(1);
            if (stack.back() != name) return fail("mismatched close");
            stack.pop_back();
        } else if (tag.back() == '/') {
            if (stack.empty()) ++roots;  // self-closing root would be odd but legal
        } else {
            std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
            if (stack.empty()) ++roots;
            stack.push_back(name);
        }
        i = close + 1;
    }
    return stack.empty() && roots == 1;
}

}  // namespace testutil
