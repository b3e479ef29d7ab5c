#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "raingen/error.hpp"
#include "raingen/format.hpp"
#include "raingen/report.hpp"

using namespace raingen;

namespace {

YearlySeries yearly(std::vector<double> totals) {
    YearlySeries y;
    y.station_id = "TEST";
    y.start_year = 1990;
    y.totals = std::move(totals);
    return y;
}

ScenarioEnsemble ensemble_of(const std::vector<std::vector<double>>& runs) {
    ScenarioEnsemble e;
    e.years = runs.empty() ? 0 : runs.front().size();
    for (const auto& r : runs) {
        Scenario s;
        s.yearly.totals = r;
        s.yearly.base = r;
        e.scenarios.push_back(std::move(s));
    }
    e.provenance.bands.normal_lower = 100.0;
    e.provenance.bands.normal_limit = 300.0;
    e.provenance.bands.normal_upper = 500.0;
    e.provenance.bands.wet_split = 700.0;
    e.provenance.bands.observed_max = 900.0;
    return e;
}

std::vector<std::vector<std::string>> parse_plot(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("summarize") {
    SUBCASE("constant") {
        const std::vector<double> v(5, 10.0);
        const auto s = summarize(v);
        CHECK(s.mean == 10.0);
        REQUIRE(s.variance);
        CHECK(*s.variance == 0.0);
        CHECK(s.zero_year_fraction == 0.0);
        CHECK(s.n == 5);
    }
    SUBCASE("hand example") {
        const std::vector<double> v = {0, 0, 10, 10};
        const auto s = summarize(v);
        CHECK(s.mean == 5.0);
        REQUIRE(s.variance);
        CHECK(*s.variance == doctest::Approx(100.0 / 3.0));
        CHECK(s.zero_year_fraction == 0.5);
        CHECK(s.min == 0.0);
        CHECK(s.max == 10.0);
    }
    SUBCASE("single value has no variance") {
        const std::vector<double> v = {7};
        const auto s = summarize(v);
        CHECK(s.mean == 7.0);
        CHECK_FALSE(s.variance);
        CHECK(comparison_to_json({}).find("\"undefined\"") != std::string::npos);
    }
    SUBCASE("empty") {
        CHECK_THROWS_AS((void)summarize(std::vector<double>{}), Error);
    }
    SUBCASE("permutation invariance") {
        auto v = oracle::gaussian_series(400.0, 80.0, 101, 9);
        const auto a = summarize(v);
        std::mt19937 g(3);
        for (int k = 0; k < 5; ++k) {
            std::shuffle(v.begin(), v.end(), g);
            const auto b = summarize(v);
            CHECK(b.mean == doctest::Approx(a.mean).epsilon(1e-13));
            CHECK(*b.variance == doctest::Approx(*a.variance).epsilon(1e-12));
            CHECK(b.min == a.min);
            CHECK(b.max == a.max);
        }
    }
    SUBCASE("min <= mean <= max") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto v = oracle::gaussian_series(1e6, 1e-3, 7, seed);
            const auto s = summarize(v);
            CHECK(s.min <= s.mean);
            CHECK(s.mean <= s.max);
            CHECK(*s.variance >= 0.0);
        }
    }
}

TEST_CASE("relative difference") {
    CHECK(relative_difference(10.0, 12.0) == doctest::Approx(0.2));
    CHECK(relative_difference(-10.0, -12.0) == doctest::Approx(0.2));
    CHECK(relative_difference(0.0, 0.0) == 0.0);
    CHECK(relative_difference(0.0, 1e-12) == doctest::Approx(1.0));
}

TEST_CASE("compare") {
    SUBCASE("against itself") {
        const std::vector<double> v = {0, 150, 320, 280, 610, 850, 300};
        const auto r = compare(yearly(v), ensemble_of({v}));
        CHECK(r.mean_relative_difference == 0.0);
        REQUIRE(r.variance_relative_difference);
        CHECK(*r.variance_relative_difference == 0.0);
        for (const auto& c : r.classes) CHECK(c.delta == 0.0);
        CHECK(r.per_scenario.size() == 1);
    }
    SUBCASE("empty ensemble") {
        CHECK_THROWS_AS((void)compare(yearly({1, 2, 3}), ScenarioEnsemble{}), Error);
    }
    SUBCASE("matched generator, K = 500") {
        const auto obs = oracle::gaussian_series(420.0, 70.0, 40, 1);
        const auto s = summarize(obs);
        const double sd = std::sqrt(*s.variance);
        std::vector<std::vector<double>> runs;
        for (std::uint64_t k = 0; k < 500; ++k) runs.push_back(oracle::gaussian_series(s.mean, sd, 40, 1000 + k));
        const auto r = compare(yearly(obs), ensemble_of(runs));
        // pooled mean has standard error sd / sqrt(20000)
        const double bound = 4.0 * sd / std::sqrt(20000.0) / s.mean;
        CHECK(r.mean_relative_difference <= bound);
        CHECK(r.mean_relative_difference <= 0.05);
        CHECK(r.pooled.n == 20000);
        CHECK(r.per_scenario.size() == 500);
    }
    SUBCASE("class frequencies") {
        const auto r = compare(yearly({0, 300, 300, 300}), ensemble_of({{300, 300, 800, 50}}));
        CHECK(r.classes[index_of(RainfallClass::VeryDry)].observed == 0.25);
        CHECK(r.classes[index_of(RainfallClass::VeryDry)].delta == -0.25);
        CHECK(r.classes[index_of(RainfallClass::VeryWet)].generated == 0.25);
        CHECK(r.classes[index_of(RainfallClass::Dry)].generated == 0.25);
    }
}

TEST_CASE("nearest-rank percentile") {
    CHECK(nearest_rank_percentile({15, 20, 35, 40, 50}, 30.0) == 20.0);
    CHECK(nearest_rank_percentile({15, 20, 35, 40, 50}, 40.0) == 20.0);
    CHECK(nearest_rank_percentile({15, 20, 35, 40, 50}, 100.0) == 50.0);
    CHECK(nearest_rank_percentile({3}, 10.0) == 3.0);
    CHECK_THROWS_AS((void)nearest_rank_percentile({}, 10.0), Error);
    CHECK_THROWS_AS((void)nearest_rank_percentile({1, 2}, 0.0), Error);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto v = oracle::gaussian_series(0.0, 1.0, 1 + seed * 7, seed);
        for (double pct : {1.0, 10.0, 25.0, 50.0, 90.0, 99.0}) {
            CHECK(nearest_rank_percentile(v, pct) == oracle::sorted_nearest_rank(v, pct));
        }
    }
}

TEST_CASE("plot data") {
    SUBCASE("single scenario collapses the band") {
        const auto d = plot_data(yearly({100, 200, 300}), ensemble_of({{110, 220, 330}}));
        REQUIRE(d.rows.size() == 3);
        for (const auto& r : d.rows) {
            CHECK(*r.p10 == *r.mean);
            CHECK(*r.p90 == *r.mean);
        }
        CHECK(d.warnings.empty());
    }
    SUBCASE("monotone ensemble matches the sort oracle") {
        std::vector<std::vector<double>> runs;
        for (int k = 0; k < 37; ++k) runs.push_back({double(k), double(3 * k), double(100 - k)});
        const auto d = plot_data(yearly({1, 2, 3}), ensemble_of(runs));
        for (std::size_t y = 0; y < 3; ++y) {
            std::vector<double> column;
            for (const auto& r : runs) column.push_back(r[y]);
            CHECK(*d.rows[y].p10 == oracle::sorted_nearest_rank(column, 10.0));
            CHECK(*d.rows[y].p90 == oracle::sorted_nearest_rank(column, 90.0));
        }
    }
    SUBCASE("length mismatch pads the shorter side") {
        const auto longer = plot_data(yearly({1, 2}), ensemble_of({{5, 6, 7, 8}}));
        REQUIRE(longer.rows.size() == 4);
        CHECK(longer.rows[1].observed);
        CHECK_FALSE(longer.rows[2].observed);
        CHECK(longer.rows[3].mean);
        CHECK_FALSE(longer.warnings.empty());
        const auto shorter = plot_data(yearly({1, 2, 3}), ensemble_of({{5}}));
        REQUIRE(shorter.rows.size() == 3);
        CHECK_FALSE(shorter.rows[2].mean);
        CHECK_FALSE(shorter.rows[2].p10);
        std::ostringstream out;
        write_plot_csv(out, shorter);
        const auto rows = parse_plot(out.str());
        REQUIRE(rows.size() == 4);
        CHECK(rows[3] == std::vector<std::string>{"3", "3", "", "", ""});
    }
    SUBCASE("CSV re-parses to 12 significant digits") {
        std::vector<std::vector<double>> runs;
        for (std::uint64_t k = 0; k < 9; ++k) runs.push_back(oracle::gaussian_series(512.345678901234, 77.7, 12, k));
        const auto obs = oracle::gaussian_series(498.7654321, 60.1, 12, 99);
        const auto d = plot_data(yearly(obs), ensemble_of(runs));
        std::ostringstream out;
        write_plot_csv(out, d);
        CHECK(out.str().rfind("# percentiles: nearest-rank", 0) == 0);
        const auto rows = parse_plot(out.str());
        REQUIRE(rows.size() == 13);
        CHECK(rows[0] == std::vector<std::string>{"year", "observed_total", "ensemble_mean", "ensemble_p10",
                                                  "ensemble_p90"});
        for (std::size_t y = 0; y < 12; ++y) {
            const auto& r = rows[y + 1];
            const std::array<double, 4> expect = {*d.rows[y].observed, *d.rows[y].mean, *d.rows[y].p10,
                                                  *d.rows[y].p90};
            for (std::size_t c = 0; c < 4; ++c) {
                const double back = std::stod(r[c + 1]);
                CHECK(std::abs(back - expect[c]) <= 5e-12 * std::abs(expect[c]));
            }
        }
    }
    SUBCASE("emit writes atomically") {
        const auto dir = std::filesystem::temp_directory_path() / "raingen_test_report";
        std::filesystem::create_directories(dir);
        const auto path = dir / "plot.csv";
        const auto warnings = emit_plot_data(yearly({1, 2}), ensemble_of({{5, 6}}), path);
        CHECK(warnings.empty());
        CHECK(std::filesystem::exists(path));
        CHECK_FALSE(std::filesystem::exists(dir / "plot.csv.tmp"));
        CHECK_THROWS_AS((void)emit_plot_data(yearly({1}), ensemble_of({{5}}), dir / "missing" / "plot.csv"), Error);
        std::filesystem::remove_all(dir);
    }
}
