#include "raingen/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "parallel.hpp"
#include "raingen/error.hpp"
#include "raingen/format.hpp"

namespace raingen {
namespace {

struct Interval {
    double lo;
    double hi;
};

Interval class_interval(RainfallClass c, const ClassBands& b) {
    switch (c) {
        case RainfallClass::Dry: return {0.0, b.normal_lower};
        case RainfallClass::Wet: return {b.normal_upper, b.wet_split};
        case RainfallClass::VeryWet: return {b.wet_split, b.observed_max};
        default: return {0.0, 0.0};
    }
}

bool interval_empty(RainfallClass c, const ClassBands& b) {
    if (c == RainfallClass::VeryDry) return false;
    const auto [lo, hi] = class_interval(c, b);
    return !(hi > lo);
}

/// Dry is the open interval (0, normal_lower); Wet and VeryWet are (lo, hi].
double draw_value(RainfallClass c, const ClassBands& b, Rng& rng) {
    if (c == RainfallClass::VeryDry) return 0.0;
    const auto [lo, hi] = class_interval(c, b);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (true) {
        const double u = unit(rng);
        if (c == RainfallClass::Dry) {
            const double v = u * hi;
            if (v > 0.0 && v < hi) return v;
        } else {
            const double v = hi - u * (hi - lo);
            if (v > lo && v <= hi) return v;
        }
    }
}

template <typename Fn>
auto at_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError(stage, e);
    }
}

}  // namespace

std::string_view to_string(Branch branch) noexcept {
    return branch == Branch::direct ? "direct" : "banded";
}

ModifiedSeries build_modified_series(std::span<const double> totals, const ClassBands& bands) {
    ModifiedSeries out;
    for (std::size_t i = 0; i < totals.size(); ++i) {
        const auto c = classify_year(totals[i], bands);
        if (is_normal(c)) {
            out.totals.push_back(totals[i]);
            out.retained_indices.push_back(i);
        } else {
            out.removed.push_back({i, c, totals[i]});
        }
    }
    if (out.totals.size() < kMinModifiedYears) {
        throw Error(Errc::too_short, "modified series keeps " + std::to_string(out.totals.size()) +
                                         " normal years; at least " + std::to_string(kMinModifiedYears) +
                                         " are needed");
    }
    return out;
}

YearlyScenario generate_yearly_scenario(const ArmaModel& model, const ClassFrequencies& frequencies,
                                        const ClassBands& bands, std::size_t years, Rng& rng,
                                        const InjectionConfig& config) {
    if (years == 0) throw Error(Errc::invalid_argument, "scenario length must be at least 1 year");
    YearlyScenario out;
    out.base = simulate(model, years, rng);
    for (auto& v : out.base) {
        if (v < 0.0) {
            v = bands.normal_lower;
            ++out.clamped;
        }
    }
    out.totals = out.base;

    std::array<std::size_t, 4> counts{};
    std::size_t requested = 0;
    if (config.deterministic_counts) {
        for (std::size_t c = 0; c < counts.size(); ++c) {
            counts[c] = static_cast<std::size_t>(
                std::llround(frequencies.frequency(kExtremeClasses[c]) * static_cast<double>(years)));
        }
        requested = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    } else {
        for (std::size_t attempt = 0; attempt <= config.max_redraws; ++attempt) {
            for (std::size_t c = 0; c < counts.size(); ++c) {
                const double f = std::clamp(frequencies.frequency(kExtremeClasses[c]), 0.0, 1.0);
                std::binomial_distribution<std::size_t> draw(years, f);
                counts[c] = draw(rng);
            }
            requested = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
            if (requested <= years) break;
        }
    }
    if (requested > years) {
        // Fill by priority VeryDry, VeryWet, Dry, Wet.
        constexpr std::array<std::size_t, 4> priority = {0, 3, 1, 2};
        std::size_t remaining = years;
        for (auto c : priority) {
            counts[c] = std::min(counts[c], remaining);
            remaining -= counts[c];
        }
        out.warnings.push_back("extreme-year counts exceeded scenario length; truncated by priority");
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0 && interval_empty(kExtremeClasses[c], bands)) {
            throw Error(Errc::invalid_argument,
                        "class " + std::string(to_string(kExtremeClasses[c])) + " has an empty value interval");
        }
    }

    const std::size_t k = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    std::vector<std::size_t> positions(years);
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, years - 1);
        std::swap(positions[i], positions[pick(rng)]);
    }
    std::size_t slot = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (std::size_t j = 0; j < counts[c]; ++j, ++slot) {
            const auto cls = kExtremeClasses[c];
            const double value = draw_value(cls, bands, rng);
            out.totals[positions[slot]] = value;
            out.injected.push_back({positions[slot], cls, value});
        }
    }
    return out;
}

std::size_t ScenarioEnsemble::clamp_count() const noexcept {
    std::size_t total = 0;
    for (const auto& s : scenarios) total += s.yearly.clamped;
    return total;
}

ScenarioEnsemble generate_ensemble(const Provenance& provenance, std::size_t scenarios, std::size_t years,
                                   std::uint64_t master_seed, const EnsembleOptions& options) {
    if (scenarios == 0) throw Error(Errc::invalid_argument, "scenario count must be at least 1");
    if (years == 0) throw Error(Errc::invalid_argument, "scenario length must be at least 1 year");
    ScenarioEnsemble ensemble;
    ensemble.master_seed = master_seed;
    ensemble.years = years;
    ensemble.provenance = provenance;
    ensemble.scenarios.resize(scenarios);

    ClassFrequencies no_extremes;
    no_extremes.total = 1;
    no_extremes.counts[index_of(RainfallClass::NormalUp)] = 1;
    const ClassFrequencies& frequencies = provenance.inject_extremes ? provenance.frequencies : no_extremes;

    detail::parallel_for(scenarios, options.threads, [&](std::size_t i) {
        Rng rng = make_stream(master_seed, i);
        Scenario& s = ensemble.scenarios[i];
        s.yearly = generate_yearly_scenario(provenance.model, frequencies, provenance.bands, years, rng,
                                            options.injection);
        s.monthly.reserve(years);
        for (double total : s.yearly.totals) s.monthly.push_back(disaggregate(total, provenance.seasonality));
    });
    return ensemble;
}

Provenance PipelineReport::provenance() const {
    Provenance p;
    p.bands = bands;
    p.frequencies = frequencies;
    p.model = model;
    p.seasonality = seasonality;
    p.inject_extremes = branch == Branch::banded;
    return p;
}

PipelineReport analyze_series(const MonthlySeries& series, const PipelineConfig& config) {
    PipelineReport report;
    report.validation = validate_series(series);
    if (!report.validation.accepted()) {
        throw PipelineError("validate", Error(Errc::validation, report.validation.errors.front().message));
    }
    for (const auto& w : report.validation.warnings) report.warnings.push_back(w.code + ": " + w.message);

    report.yearly = at_stage("aggregate", [&] { return aggregate_yearly(series); });
    report.seasonality = at_stage("seasonality", [&] { return compute_seasonality(series, report.yearly); });
    const std::span<const double> totals(report.yearly.totals);

    try {
        report.direct_selection = select_order(totals, config.select);
    } catch (const Error& e) {
        report.direct_failure = e.what();
    }

    // Bands are computed on both branches: they bound clamping and let the
    // comparison classify generated years.
    report.normal_limit = at_stage("normal_limit", [&] { return compute_normal_limit(totals, config.banding); });
    report.bands = at_stage("bands", [&] { return derive_bands(report.normal_limit, totals, config.banding); });
    report.frequencies = at_stage("frequencies", [&] { return compute_frequencies(totals, report.bands); });

    if (report.direct_selection && report.direct_selection->adequate) {
        report.branch = Branch::direct;
        report.model = report.direct_selection->model;
        return report;
    }
    report.branch = Branch::banded;
    report.modified = at_stage("modified_series", [&] { return build_modified_series(totals, report.bands); });
    report.modified_selection =
        at_stage("modified_arma", [&] { return select_order(report.modified->totals, config.select); });
    report.model = report.modified_selection->model;
    if (!report.modified_selection->adequate) {
        report.warnings.push_back("modified-series ARMA residuals fail the whiteness test");
    }
    return report;
}

PipelineResult run_pipeline(const MonthlySeries& series, const PipelineConfig& config) {
    if (config.scenarios == 0) {
        throw PipelineError("config", Error(Errc::invalid_argument, "scenario count must be at least 1"));
    }
    PipelineResult result;
    result.report = analyze_series(series, config);
    const std::size_t years = config.years.value_or(result.report.yearly.size());
    EnsembleOptions options;
    options.injection = config.injection;
    options.threads = config.threads;
    result.ensemble = at_stage("generate", [&] {
        return generate_ensemble(result.report.provenance(), config.scenarios, years, config.seed, options);
    });
    auto& report = result.report;
    report.scenarios = config.scenarios;
    report.years = years;
    report.seed = config.seed;
    report.clamp_count = result.ensemble.clamp_count();
    std::size_t truncated = 0;
    for (const auto& s : result.ensemble.scenarios) truncated += s.yearly.warnings.empty() ? 0 : 1;
    if (truncated > 0) {
        report.warnings.push_back(std::to_string(truncated) +
                                  " scenario(s) truncated extreme-year counts to the scenario length");
    }
    return result;
}

void write_ensemble_monthly_csv(std::ostream& out, const ScenarioEnsemble& ensemble) {
    const auto& seasonality = ensemble.provenance.seasonality;
    out << "scenario,year,month,precip_mm\n";
    std::string line;
    for (std::size_t s = 0; s < ensemble.scenarios.size(); ++s) {
        const auto& monthly = ensemble.scenarios[s].monthly;
        for (std::size_t y = 0; y < monthly.size(); ++y) {
            for (std::size_t m = 0; m < 12; ++m) {
                line.clear();
                line += std::to_string(s + 1);
                line += ',';
                line += std::to_string(y + 1);
                line += ',';
                line += std::to_string(seasonality.calendar_month(m));
                line += ',';
                line += format_g12(monthly[y][m]);
                line += '\n';
                out << line;
            }
        }
    }
}

void write_ensemble_yearly_csv(std::ostream& out, const ScenarioEnsemble& ensemble) {
    out << "scenario,year,total_mm,class_injected\n";
    for (std::size_t s = 0; s < ensemble.scenarios.size(); ++s) {
        const auto& yearly = ensemble.scenarios[s].yearly;
        std::vector<std::string_view> labels(yearly.totals.size(), "none");
        for (const auto& inj : yearly.injected) labels[inj.position] = to_string(inj.cls);
        for (std::size_t y = 0; y < yearly.totals.size(); ++y) {
            out << (s + 1) << ',' << (y + 1) << ',' << format_g12(yearly.totals[y]) << ',' << labels[y] << '\n';
        }
    }
}

ScenarioEnsemble read_ensemble_yearly_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw Error(Errc::parse, "ensemble line " + std::to_string(line_no) + ": " + what);
    };
    if (!std::getline(in, line)) throw Error(Errc::parse, "empty ensemble file");
    ++line_no;
    if (trim(line) != "scenario,year,total_mm,class_injected") fail("unexpected header");

    std::map<long long, std::map<long long, std::pair<double, std::string>>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (auto comma = text.find(','); comma != std::string_view::npos; comma = text.find(',', start)) {
            fields.push_back(text.substr(start, comma - start));
            start = comma + 1;
        }
        fields.push_back(text.substr(start));
        if (fields.size() != 4) fail("expected 4 fields");
        const auto scenario = parse_integer(fields[0]);
        const auto year = parse_integer(fields[1]);
        const auto total = parse_double(fields[2]);
        if (!scenario || !year || !total || *scenario < 1 || *year < 1 || *total < 0.0) fail("bad value");
        if (!rows[*scenario].emplace(*year, std::make_pair(*total, std::string(trim(fields[3])))).second) {
            fail("duplicate (scenario, year)");
        }
    }
    if (rows.empty()) throw Error(Errc::parse, "ensemble file has no rows");

    ScenarioEnsemble ensemble;
    long long expected_scenario = 1;
    for (const auto& [id, years] : rows) {
        if (id != expected_scenario++) throw Error(Errc::parse, "scenario numbers are not contiguous from 1");
        Scenario s;
        long long expected_year = 1;
        for (const auto& [year, entry] : years) {
            if (year != expected_year++) throw Error(Errc::parse, "years are not contiguous from 1");
            const auto position = s.yearly.totals.size();
            s.yearly.totals.push_back(entry.first);
            if (entry.second != "none") {
                const auto cls = class_from_string(entry.second);
                if (!cls) throw Error(Errc::parse, "unknown class label '" + entry.second + "'");
                s.yearly.injected.push_back({position, *cls, entry.first});
            }
        }
        s.yearly.base = s.yearly.totals;
        if (ensemble.years == 0) ensemble.years = s.yearly.totals.size();
        if (s.yearly.totals.size() != ensemble.years) throw Error(Errc::parse, "scenarios differ in length");
        ensemble.scenarios.push_back(std::move(s));
    }
    return ensemble;
}

}  // namespace raingen
