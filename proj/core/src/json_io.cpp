// JSON exports. nlohmann/json stays private to this translation unit.

#include <cmath>
#include <json.hpp>

#include "raingen/arma.hpp"
#include "raingen/banding.hpp"
#include "raingen/error.hpp"
#include "raingen/format.hpp"
#include "raingen/report.hpp"
#include "raingen/scenario.hpp"

namespace raingen {
namespace {

using nlohmann::json;

/// Report numbers carry at most 12 significant digits.
json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return *parse_double(format_g12(v));
}

json num(const std::optional<double>& v) { return v ? num(*v) : json("undefined"); }

json bands_json(const ClassBands& b) {
    return {{"observed_min", num(b.observed_min)}, {"normal_lower", num(b.normal_lower)},
            {"normal_limit", num(b.normal_limit)}, {"normal_upper", num(b.normal_upper)},
            {"wet_split", num(b.wet_split)},       {"observed_max", num(b.observed_max)}};
}

json frequencies_json(const ClassFrequencies& f) {
    json counts = json::object();
    json freqs = json::object();
    for (auto c : kAllClasses) {
        counts[std::string(to_string(c))] = f.count(c);
        freqs[std::string(to_string(c))] = num(f.frequency(c));
    }
    return {{"years", f.total}, {"counts", counts}, {"frequencies", freqs}};
}

json limit_json(const NormalLimitResult& r) {
    json history = json::array();
    for (double m : r.history) history.push_back(num(m));
    return {{"normal_limit", num(r.normal_limit)},
            {"iterations", r.iterations},
            {"stop_reason", to_string(r.stop_reason)},
            {"retained_indices", r.retained_indices},
            {"history", history}};
}

json model_json(const ArmaModel& m) {
    const bool degenerate = is_degenerate(m);
    json out = {{"p", m.p},
                {"q", m.q},
                {"mean", m.mean},
                {"ar_coeffs", m.ar_coeffs},
                {"ma_coeffs", m.ma_coeffs},
                {"noise_variance", m.noise_variance},
                {"n_fit", m.n_fit},
                {"diagnostics",
                 {{"sse", m.sse},
                  {"aic", degenerate ? json(nullptr) : json(aic_score(m))},
                  {"fpe", m.n_fit > m.p + m.q + 1 ? json(fpe_score(m)) : json(nullptr)},
                  {"degenerate_perfect_fit", degenerate},
                  {"iterations", m.iterations},
                  {"restarts", m.restarts},
                  {"converged", m.converged},
                  {"stationary", is_stationary(m)},
                  {"invertible", is_invertible(m)}}}};
    return out;
}

json selection_json(const OrderSelection& s) {
    json grid = json::array();
    for (const auto& sc : s.scores) {
        json row = {{"p", sc.p}, {"q", sc.q}, {"ok", sc.ok}};
        if (sc.ok) {
            row["aic"] = num(sc.aic);
            row["fpe"] = num(sc.fpe);
            row["noise_variance"] = num(sc.noise_variance);
        } else {
            row["failure"] = sc.failure;
        }
        grid.push_back(row);
    }
    return {{"chosen", {{"p", s.p}, {"q", s.q}}},
            {"criterion", "aic, fpe tiebreak"},
            {"adequate", s.adequate},
            {"adequacy_gate", "Ljung-Box on CSS residuals, pass if p > 0.05 (tool's own gate)"},
            {"whiteness",
             {{"statistic", num(s.whiteness.test.statistic)},
              {"p_value", num(s.whiteness.test.p_value)},
              {"lags", s.whiteness.test.lags},
              {"dof", s.whiteness.test.dof},
              {"pass", s.whiteness.pass}}},
            {"model", model_json(s.model)},
            {"grid", grid}};
}

json stats_json(const SummaryStats& s) {
    return {{"n", s.n},       {"mean", num(s.mean)}, {"variance", num(s.variance)},
            {"min", num(s.min)}, {"max", num(s.max)}, {"zero_year_fraction", num(s.zero_year_fraction)}};
}

}  // namespace

std::string banding_to_json(const NormalLimitResult& limit, const ClassBands& bands,
                            const ClassFrequencies& frequencies) {
    json out = {{"normal_limit", limit_json(limit)}, {"bands", bands_json(bands)},
                {"frequencies", frequencies_json(frequencies)}};
    return out.dump(2) + "\n";
}

std::string model_to_json(const ArmaModel& model) { return model_json(model).dump(2) + "\n"; }

ArmaModel model_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        ArmaModel m;
        m.p = j.at("p").get<std::size_t>();
        m.q = j.at("q").get<std::size_t>();
        m.mean = j.at("mean").get<double>();
        m.ar_coeffs = j.at("ar_coeffs").get<std::vector<double>>();
        m.ma_coeffs = j.at("ma_coeffs").get<std::vector<double>>();
        m.noise_variance = j.at("noise_variance").get<double>();
        m.n_fit = j.value("n_fit", std::size_t{0});
        if (j.contains("diagnostics")) {
            const auto& d = j["diagnostics"];
            m.sse = d.value("sse", 0.0);
            m.iterations = d.value("iterations", std::size_t{0});
            m.restarts = d.value("restarts", std::size_t{0});
            m.converged = d.value("converged", true);
        }
        if (m.ar_coeffs.size() != m.p || m.ma_coeffs.size() != m.q) {
            throw Error(Errc::parse, "coefficient counts do not match the orders");
        }
        if (!(m.noise_variance >= 0.0)) throw Error(Errc::parse, "noise variance must be >= 0");
        if (!is_stationary(m) || !is_invertible(m)) {
            throw Error(Errc::parse, "model is not stationary and invertible");
        }
        return m;
    } catch (const json::exception& e) {
        throw Error(Errc::parse, std::string("model JSON: ") + e.what());
    }
}

std::string selection_to_json(const OrderSelection& selection) { return selection_json(selection).dump(2) + "\n"; }

std::string pipeline_report_to_json(const PipelineReport& r) {
    json seasonality = json::array();
    for (std::size_t m = 0; m < 12; ++m) {
        seasonality.push_back({{"month", r.seasonality.calendar_month(m)}, {"factor", num(r.seasonality.factors[m])}});
    }
    json warnings = r.warnings;
    json out = {
        {"station", r.yearly.station_id},
        {"start_year", r.yearly.start_year},
        {"years", r.yearly.size()},
        {"branch", to_string(r.branch)},
        {"seasonality", {{"years_used", r.seasonality.years_used}, {"factors", seasonality}}},
        {"normal_limit", limit_json(r.normal_limit)},
        {"bands", bands_json(r.bands)},
        {"frequencies", frequencies_json(r.frequencies)},
        {"model", model_json(r.model)},
        {"warnings", warnings},
    };
    if (r.direct_selection) {
        out["direct_arma"] = selection_json(*r.direct_selection);
    } else {
        out["direct_arma"] = {{"failure", r.direct_failure}};
    }
    if (r.modified) {
        json removed = json::array();
        for (const auto& rm : r.modified->removed) {
            removed.push_back({{"index", rm.index}, {"class", to_string(rm.cls)}, {"value", num(rm.value)}});
        }
        out["modified_series"] = {{"length", r.modified->totals.size()}, {"removed", removed}};
    }
    if (r.modified_selection) out["modified_arma"] = selection_json(*r.modified_selection);
    if (r.scenarios > 0) {
        out["generation"] = {{"scenarios", r.scenarios},
                             {"years", r.years},
                             {"seed", r.seed},
                             {"clamp_count", r.clamp_count},
                             {"extremes_injected", r.branch == Branch::banded}};
    }
    return out.dump(2) + "\n";
}

std::string comparison_to_json(const ComparisonReport& report) {
    json per_scenario = json::array();
    for (const auto& s : report.per_scenario) per_scenario.push_back(stats_json(s));
    json classes = json::array();
    for (const auto& c : report.classes) {
        classes.push_back({{"class", to_string(c.cls)},
                           {"observed", num(c.observed)},
                           {"generated", num(c.generated)},
                           {"delta", num(c.delta)}});
    }
    json out = {{"observed", stats_json(report.observed)},
                {"ensemble_pooled", stats_json(report.pooled)},
                {"relative_difference",
                 {{"mean", num(report.mean_relative_difference)},
                  {"variance", num(report.variance_relative_difference)}}},
                {"class_frequencies", classes},
                {"per_scenario", per_scenario}};
    return out.dump(2) + "\n";
}

}  // namespace raingen
