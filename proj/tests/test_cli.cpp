#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using raingen::cli::run_command;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_command(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Workspace {
    fs::path root;
    fs::path input;

    Workspace() {
        root = fs::temp_directory_path() / "raingen_test_cli";
        fs::remove_all(root);
        fs::create_directories(root);
        auto totals = raingen::oracle::gaussian_series(480.0, 70.0, 30, 5);
        for (std::size_t i : {4, 12, 20, 28}) totals[i] = 0.0;
        const std::vector<double> profile = {5, 5, 4, 3, 2, 1, 0.5, 0.5, 1, 3, 4, 5};
        const auto series = raingen::oracle::monthly_from_totals(totals, profile);
        input = root / "monthly.csv";
        std::ofstream f(input);
        raingen::write_monthly_csv(f, series);
    }
    ~Workspace() { fs::remove_all(root); }

    std::string dir(const char* name) const { return (root / name).string(); }
};

}  // namespace

TEST_CASE("analyze") {
    Workspace ws;
    const auto r = run({"analyze", "--input", ws.input.string(), "--output", ws.dir("a")});
    CHECK(r.code == 0);
    CHECK(fs::exists(ws.root / "a" / "analysis.json"));
    CHECK(fs::exists(ws.root / "a" / "seasonality.csv"));
    CHECK(r.out.find("branch:") != std::string::npos);
    const auto json = slurp(ws.root / "a" / "analysis.json");
    CHECK(json.find("\"bands\"") != std::string::npos);
    CHECK(json.find("\"frequencies\"") != std::string::npos);
    CHECK(json.find("\"direct_arma\"") != std::string::npos);
}

TEST_CASE("generate is reproducible") {
    Workspace ws;
    const std::vector<std::string> files = {"ensemble_monthly.csv", "ensemble_yearly.csv", "report.json",
                                            "comparison.json", "plot_data.csv"};
    auto gen = [&](const char* dir, const char* threads) {
        return run({"generate", "-i", ws.input.string(), "-o", ws.dir(dir), "--seed", "42", "--scenarios", "10",
                    "--threads", threads});
    };
    REQUIRE(gen("g1", "1").code == 0);
    REQUIRE(gen("g2", "1").code == 0);
    REQUIRE(gen("g3", "4").code == 0);
    for (const auto& f : files) {
        const auto a = slurp(ws.root / "g1" / f);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(ws.root / "g2" / f));
        CHECK(a == slurp(ws.root / "g3" / f));
    }
    REQUIRE(run({"generate", "-i", ws.input.string(), "-o", ws.dir("g4"), "--seed", "43", "-k", "10"}).code == 0);
    CHECK(slurp(ws.root / "g1" / "ensemble_yearly.csv") != slurp(ws.root / "g4" / "ensemble_yearly.csv"));
}

TEST_CASE("usage errors exit 1") {
    Workspace ws;
    const auto in = ws.input.string();
    CHECK(run({"generate", "-i", in, "-o", ws.dir("x"), "--seed", "1", "--scenarios", "0"}).code == 1);
    CHECK(run({"generate", "-i", in, "-o", ws.dir("x"), "--seed", "1", "--years", "0"}).code == 1);
    CHECK(run({"generate", "-i", in, "-o", ws.dir("x"), "--seed", "1", "--wet-split-fraction", "1"}).code == 1);
    CHECK(run({"analyze", "-i", in, "-o", ws.dir("x"), "--year-start-month", "13"}).code == 1);
    CHECK(run({"analyze", "-i", in, "--no-such-flag"}).code == 1);
    CHECK(run({"analyze", "-i", (ws.root / "missing.csv").string()}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK_FALSE(fs::exists(ws.root / "x"));
}

TEST_CASE("seed is required, with an environment fallback") {
    Workspace ws;
    const auto in = ws.input.string();
    ::unsetenv("RAINGEN_SEED");
    const auto missing = run({"generate", "-i", in, "-o", ws.dir("s0"), "-k", "2"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("seed") != std::string::npos);
    ::setenv("RAINGEN_SEED", "42", 1);
    REQUIRE(run({"generate", "-i", in, "-o", ws.dir("s1"), "-k", "2"}).code == 0);
    ::unsetenv("RAINGEN_SEED");
    REQUIRE(run({"generate", "-i", in, "-o", ws.dir("s2"), "-k", "2", "--seed", "42"}).code == 0);
    CHECK(slurp(ws.root / "s1" / "ensemble_yearly.csv") == slurp(ws.root / "s2" / "ensemble_yearly.csv"));
}

TEST_CASE("invalid data exits 1 and writes nothing") {
    Workspace ws;
    const auto bad = ws.root / "bad.csv";
    {
        std::ofstream f(bad);
        f << "station,year,month,precip_mm\nA,2000,1,-5\n";
    }
    const auto r = run({"generate", "-i", bad.string(), "-o", ws.dir("bad"), "--seed", "1"});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
    CHECK_FALSE(fs::exists(ws.root / "bad"));
}

TEST_CASE("config file with flag overrides") {
    Workspace ws;
    const auto cfg = ws.root / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# defaults for this station\nseed = 7\nscenarios = 3\nmax_p = 2\n\ndeterministic-counts = true\n";
    }
    const auto r = run({"generate", "-i", ws.input.string(), "-o", ws.dir("c"), "--config", cfg.string(),
                        "--scenarios", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("5 scenarios") != std::string::npos);
    CHECK(r.out.find("seed 7") != std::string::npos);
    const auto report = slurp(ws.root / "c" / "report.json");
    CHECK(report.find("\"seed\": 7") != std::string::npos);

    const auto bogus = ws.root / "bogus.cfg";
    {
        std::ofstream f(bogus);
        f << "colour = blue\n";
    }
    CHECK(run({"analyze", "-i", ws.input.string(), "-o", ws.dir("c2"), "--config", bogus.string()}).code == 1);
    const auto malformed = ws.root / "malformed.cfg";
    {
        std::ofstream f(malformed);
        f << "seed 7\n";
    }
    CHECK(run({"generate", "-i", ws.input.string(), "-o", ws.dir("c3"), "--config", malformed.string()}).code == 1);
}

TEST_CASE("help lists every flag with its default") {
    const auto r = run({"generate", "--help"});
    CHECK(r.code == 0);
    for (const char* flag : {"--input", "--output", "--seed", "--scenarios", "--years", "--max-p", "--max-q",
                             "--year-start-month", "--wet-split-fraction", "--deterministic-counts", "--threads",
                             "--config"}) {
        CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
    }
    for (const char* def : {"[100]", "[3]", "[1]", "[0.5]", "[raingen_out]", "[record length]", "RAINGEN_SEED"}) {
        CHECK_MESSAGE(r.out.find(def) != std::string::npos, def);
    }
}

TEST_CASE("compare") {
    Workspace ws;
    REQUIRE(run({"generate", "-i", ws.input.string(), "-o", ws.dir("g"), "--seed", "3", "-k", "20"}).code == 0);
    const auto r = run({"compare", "-i", ws.input.string(), "-e", (ws.root / "g" / "ensemble_yearly.csv").string(),
                        "-o", ws.dir("cmp")});
    CHECK(r.code == 0);
    CHECK(fs::exists(ws.root / "cmp" / "comparison.json"));
    CHECK(fs::exists(ws.root / "cmp" / "plot_data.csv"));
    // the ensemble file holds 12 significant digits, so agreement is to that precision
    std::istringstream a(slurp(ws.root / "cmp" / "plot_data.csv"));
    std::istringstream b(slurp(ws.root / "g" / "plot_data.csv"));
    std::string la;
    std::string lb;
    std::size_t rows = 0;
    while (std::getline(a, la) && std::getline(b, lb)) {
        ++rows;
        if (rows <= 2) {
            CHECK(la == lb);
            continue;
        }
        std::istringstream ca(la);
        std::istringstream cb(lb);
        std::string x;
        std::string y;
        while (std::getline(ca, x, ',') && std::getline(cb, y, ',')) {
            CHECK(std::stod(x) == doctest::Approx(std::stod(y)).epsilon(1e-10));
        }
    }
    CHECK(rows == 32);
}
