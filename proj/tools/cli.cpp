#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "raingen/error.hpp"
#include "raingen/format.hpp"
#include "raingen/ingest.hpp"
#include "raingen/report.hpp"
#include "raingen/scenario.hpp"
#include "raingen/seasonality.hpp"

namespace raingen::cli {
namespace {

namespace fs = std::filesystem;

struct Settings {
    std::string input;
    std::string output = "raingen_out";
    std::string ensemble;
    std::optional<std::uint64_t> seed;
    std::size_t scenarios = 100;
    std::optional<std::size_t> years;
    std::size_t max_p = 3;
    std::size_t max_q = 3;
    int year_start_month = 1;
    double wet_split_fraction = 0.5;
    bool deterministic_counts = false;
    std::size_t threads = 0;
};

using OutputFile = std::pair<std::string, std::string>;

const CLI::Validator kOpenUnit(
    [](std::string& text) -> std::string {
        const auto v = parse_double(text);
        if (!v || !(*v > 0.0 && *v < 1.0)) return "must lie strictly between 0 and 1";
        return {};
    },
    "(0,1)");

void add_input_options(CLI::App* sub, Settings& s) {
    sub->add_option("-i,--input", s.input, "Monthly CSV: station,year,month,precip_mm")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output", s.output, "Output directory")->capture_default_str();
    sub->add_option("--year-start-month", s.year_start_month, "Calendar month that opens each year")
        ->check(CLI::Range(1, 12))
        ->capture_default_str();
    sub->add_option("--wet-split-fraction", s.wet_split_fraction,
                    "Wet/very-wet split as a fraction of the span above the normal band")
        ->check(kOpenUnit)
        ->capture_default_str();
}

void add_model_options(CLI::App* sub, Settings& s) {
    sub->add_option("--max-p", s.max_p, "Largest AR order on the selection grid")
        ->check(CLI::Range(0, 10))
        ->capture_default_str();
    sub->add_option("--max-q", s.max_q, "Largest MA order on the selection grid")
        ->check(CLI::Range(0, 10))
        ->capture_default_str();
    sub->add_option("--threads", s.threads, "Worker threads (0 = all cores); output does not depend on it")
        ->capture_default_str();
}

void finish_subcommand(CLI::App* sub, std::string& config) {
    sub->add_option("--config", config, "File of `key = value` lines (keys are flag names); flags override it")
        ->check(CLI::ExistingFile);
    for (auto* opt : sub->get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

/// Config lines become `--key=value` tokens placed right after the
/// subcommand, ahead of the user's own flags, so TakeLast lets flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.front() != '-'; });
    if (!path || sub == args.end()) return args;

    std::ifstream in(*path);
    if (!in) return args;  // reported by the ExistingFile check
    std::vector<std::string> injected;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string uncommented = line.substr(0, line.find('#'));
        const auto text = trim(uncommented);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw CLI::ValidationError("--config", *path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        std::string key(trim(text.substr(0, eq)));
        std::string value(trim(text.substr(eq + 1)));
        std::replace(key.begin(), key.end(), '_', '-');
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty() || key == "config") {
            throw CLI::ValidationError("--config", *path + ":" + std::to_string(line_no) + ": bad key");
        }
        injected.push_back("--" + key + "=" + value);
    }
    std::vector<std::string> out(args.begin(), sub + 1);
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), sub + 1, args.end());
    return out;
}

std::size_t worker_count(std::size_t requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

PipelineConfig pipeline_config(const Settings& s) {
    PipelineConfig c;
    c.parse.year_start_month = s.year_start_month;
    c.banding.wet_split_fraction = s.wet_split_fraction;
    c.select.max_p = s.max_p;
    c.select.max_q = s.max_q;
    c.threads = worker_count(s.threads);
    c.select.threads = c.threads;
    c.injection.deterministic_counts = s.deterministic_counts;
    c.scenarios = s.scenarios;
    c.years = s.years;
    c.seed = s.seed.value_or(0);
    return c;
}

MonthlySeries load_series(const Settings& s) {
    std::ifstream in(s.input, std::ios::binary);
    if (!in) throw Error(Errc::invalid_argument, "cannot open input " + s.input);
    ParseOptions options;
    options.year_start_month = s.year_start_month;
    return parse_monthly_csv(in, options);
}

template <typename Writer>
std::string render(Writer&& write) {
    std::ostringstream out;
    write(out);
    return out.str();
}

/// Every file goes to a temporary first; renames happen only once all of
/// them were written, so a failure leaves no partial output behind.
void commit(const fs::path& dir, const std::vector<OutputFile>& files) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io, "cannot create output directory " + dir.string());
    std::vector<fs::path> written;
    auto discard = [&] {
        for (const auto& p : written) fs::remove(p, ec);
    };
    for (const auto& [name, content] : files) {
        const auto tmp = dir / (name + ".tmp");
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (f) written.push_back(tmp);
        f << content;
        f.close();
        if (!f) {
            discard();
            throw Error(Errc::io, "cannot write " + tmp.string());
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        fs::rename(written[i], dir / files[i].first, ec);
        if (ec) {
            discard();
            throw Error(Errc::io, "cannot write " + (dir / files[i].first).string());
        }
    }
}

void print_selection(std::ostream& out, const char* label, const OrderSelection& s) {
    out << label << ": ARMA(" << s.p << "," << s.q << "), residuals "
        << (s.adequate ? "white" : "not white") << " (Ljung-Box p = " << format_g12(s.whiteness.test.p_value)
        << ")\n";
}

void print_analysis(std::ostream& out, const PipelineReport& r) {
    out << "station " << r.yearly.station_id << ", " << r.yearly.size() << " years from " << r.yearly.start_year
        << "\n";
    if (r.direct_selection) {
        print_selection(out, "direct", *r.direct_selection);
    } else {
        out << "direct: no fit (" << r.direct_failure << ")\n";
    }
    out << "branch: " << to_string(r.branch) << "\n";
    out << "normal limit " << format_g12(r.bands.normal_limit) << " mm, normal band ["
        << format_g12(r.bands.normal_lower) << ", " << format_g12(r.bands.normal_upper) << "], wet split "
        << format_g12(r.bands.wet_split) << "\n";
    out << "class counts:";
    for (auto c : kAllClasses) out << ' ' << to_string(c) << '=' << r.frequencies.count(c);
    out << "\n";
    if (r.modified_selection) print_selection(out, "modified", *r.modified_selection);
    for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

int analyze(const Settings& s, std::ostream& out) {
    const auto series = load_series(s);
    const auto report = analyze_series(series, pipeline_config(s));
    commit(s.output, {{"analysis.json", pipeline_report_to_json(report)},
                      {"seasonality.csv", render([&](std::ostream& o) { write_seasonality_csv(o, report.seasonality); })}});
    print_analysis(out, report);
    out << "wrote analysis.json, seasonality.csv to " << s.output << "\n";
    return kOk;
}

int generate(const Settings& s, std::ostream& out) {
    const auto series = load_series(s);
    const auto result = run_pipeline(series, pipeline_config(s));
    const auto& ensemble = result.ensemble;
    const auto comparison = compare(result.report.yearly, ensemble);
    const auto plot = plot_data(result.report.yearly, ensemble);
    commit(s.output,
           {{"ensemble_monthly.csv", render([&](std::ostream& o) { write_ensemble_monthly_csv(o, ensemble); })},
            {"ensemble_yearly.csv", render([&](std::ostream& o) { write_ensemble_yearly_csv(o, ensemble); })},
            {"report.json", pipeline_report_to_json(result.report)},
            {"comparison.json", comparison_to_json(comparison)},
            {"plot_data.csv", render([&](std::ostream& o) { write_plot_csv(o, plot); })}});
    print_analysis(out, result.report);
    out << ensemble.scenarios.size() << " scenarios x " << ensemble.years << " years, seed " << *s.seed << "\n";
    out << "pooled mean " << format_g12(comparison.pooled.mean) << " mm vs observed "
        << format_g12(comparison.observed.mean) << " mm\n";
    for (const auto& w : plot.warnings) out << "warning: " << w << "\n";
    out << "wrote ensemble_monthly.csv, ensemble_yearly.csv, report.json, comparison.json, plot_data.csv to "
        << s.output << "\n";
    return kOk;
}

int compare_command(const Settings& s, std::ostream& out) {
    const auto series = load_series(s);
    const auto validation = validate_series(series);
    if (!validation.accepted()) throw Error(Errc::validation, validation.errors.front().message);
    const auto yearly = aggregate_yearly(series);
    std::ifstream in(s.ensemble, std::ios::binary);
    if (!in) throw Error(Errc::invalid_argument, "cannot open ensemble " + s.ensemble);
    auto ensemble = read_ensemble_yearly_csv(in);

    BandingConfig banding;
    banding.wet_split_fraction = s.wet_split_fraction;
    const auto limit = compute_normal_limit(yearly, banding);
    ensemble.provenance.bands = derive_bands(limit, yearly, banding);

    const auto comparison = compare(yearly, ensemble);
    const auto plot = plot_data(yearly, ensemble);
    commit(s.output, {{"comparison.json", comparison_to_json(comparison)},
                      {"plot_data.csv", render([&](std::ostream& o) { write_plot_csv(o, plot); })}});
    out << "observed: mean " << format_g12(comparison.observed.mean) << " mm over " << comparison.observed.n
        << " years\n";
    out << "ensemble: mean " << format_g12(comparison.pooled.mean) << " mm over " << comparison.pooled.n
        << " scenario-years\n";
    out << "relative difference: mean " << format_g12(comparison.mean_relative_difference) << ", variance "
        << (comparison.variance_relative_difference ? format_g12(*comparison.variance_relative_difference)
                                                    : std::string("undefined"))
        << "\n";
    for (const auto& w : plot.warnings) out << "warning: " << w << "\n";
    out << "wrote comparison.json, plot_data.csv to " << s.output << "\n";
    return kOk;
}

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::fit_failed:
        case Errc::io: return kInternal;
        default: return kUsage;
    }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Settings s;
    std::string config;
    CLI::App app{"raingen: monthly rainfall scenarios from a historical record", "raingen"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    auto* analyze_cmd = app.add_subcommand("analyze", "Bands, class frequencies and ARMA order selection");
    add_input_options(analyze_cmd, s);
    add_model_options(analyze_cmd, s);
    finish_subcommand(analyze_cmd, config);

    auto* generate_cmd = app.add_subcommand("generate", "Full scenario ensemble");
    add_input_options(generate_cmd, s);
    add_model_options(generate_cmd, s);
    generate_cmd->add_option("--seed", s.seed, "Master seed (required)")->envname("RAINGEN_SEED");
    generate_cmd->add_option("-k,--scenarios", s.scenarios, "Number of scenarios")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}))
        ->capture_default_str();
    generate_cmd->add_option("-l,--years", s.years, "Years per scenario")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
        ->default_str("record length");
    generate_cmd->add_flag("--deterministic-counts", s.deterministic_counts,
                           "Inject round(f * L) extreme years per class instead of Binomial draws")
        ->capture_default_str();
    finish_subcommand(generate_cmd, config);

    auto* compare_cmd = app.add_subcommand("compare", "Observed record against a generated yearly ensemble");
    add_input_options(compare_cmd, s);
    compare_cmd->add_option("-e,--ensemble", s.ensemble, "ensemble_yearly.csv from `generate`")
        ->required()
        ->check(CLI::ExistingFile);
    finish_subcommand(compare_cmd, config);

    try {
        const auto expanded = expand_config(args);
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
        if (generate_cmd->parsed() && !s.seed) {
            throw CLI::RequiredError("--seed (or RAINGEN_SEED)");
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (analyze_cmd->parsed()) return analyze(s, out);
        if (generate_cmd->parsed()) return generate(s, out);
        return compare_command(s, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

}  // namespace raingen::cli
