#include "raingen/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "raingen/error.hpp"
#include "raingen/format.hpp"

namespace raingen {

SummaryStats summarize(std::span<const double> totals) {
    if (totals.empty()) throw Error(Errc::invalid_argument, "cannot summarize an empty series");
    SummaryStats s;
    s.n = totals.size();
    const auto n = static_cast<double>(s.n);
    double sum = 0.0;
    std::size_t zeros = 0;
    s.min = totals.front();
    s.max = totals.front();
    for (double v : totals) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
        if (v == 0.0) ++zeros;
    }
    s.mean = std::clamp(sum / n, s.min, s.max);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : totals) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / (n - 1.0);
    }
    s.zero_year_fraction = static_cast<double>(zeros) / n;
    return s;
}

double relative_difference(double observed, double generated) noexcept {
    return std::abs(observed - generated) / std::max(std::abs(observed), 1e-12);
}

ComparisonReport compare(const YearlySeries& observed, const ScenarioEnsemble& ensemble) {
    if (ensemble.scenarios.empty()) throw Error(Errc::invalid_argument, "cannot compare against an empty ensemble");
    ComparisonReport report;
    report.observed = summarize(observed.totals);

    std::vector<double> pooled;
    pooled.reserve(ensemble.scenarios.size() * ensemble.years);
    for (const auto& s : ensemble.scenarios) {
        report.per_scenario.push_back(summarize(s.yearly.totals));
        pooled.insert(pooled.end(), s.yearly.totals.begin(), s.yearly.totals.end());
    }
    report.pooled = summarize(pooled);
    report.mean_relative_difference = relative_difference(report.observed.mean, report.pooled.mean);
    if (report.observed.variance && report.pooled.variance) {
        report.variance_relative_difference = relative_difference(*report.observed.variance, *report.pooled.variance);
    }

    const auto& bands = ensemble.provenance.bands;
    const auto obs = compute_frequencies(observed.totals, bands);
    const auto gen = compute_frequencies(pooled, bands);
    for (auto c : kAllClasses) {
        auto& row = report.classes[index_of(c)];
        row.cls = c;
        row.observed = obs.frequency(c);
        row.generated = gen.frequency(c);
        row.delta = row.generated - row.observed;
    }
    return report;
}

double nearest_rank_percentile(std::vector<double> values, double pct) {
    if (values.empty()) throw Error(Errc::invalid_argument, "percentile of an empty sample");
    if (!(pct > 0.0 && pct <= 100.0)) throw Error(Errc::invalid_argument, "percentile must be in (0, 100]");
    const auto n = values.size();
    auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    return values[rank - 1];
}

PlotData plot_data(const YearlySeries& observed, const ScenarioEnsemble& ensemble) {
    if (ensemble.scenarios.empty()) throw Error(Errc::invalid_argument, "cannot plot an empty ensemble");
    PlotData data;
    const std::size_t n_obs = observed.size();
    const std::size_t n_gen = ensemble.years;
    if (n_obs != n_gen) {
        data.warnings.push_back("observed length " + std::to_string(n_obs) + " differs from scenario length " +
                                std::to_string(n_gen) + "; missing cells left empty");
    }
    const std::size_t rows = std::max(n_obs, n_gen);
    std::vector<double> column(ensemble.scenarios.size());
    for (std::size_t y = 0; y < rows; ++y) {
        PlotRow row;
        row.year = y + 1;
        if (y < n_obs) row.observed = observed.totals[y];
        if (y < n_gen) {
            double sum = 0.0;
            for (std::size_t s = 0; s < column.size(); ++s) {
                column[s] = ensemble.scenarios[s].yearly.totals[y];
                sum += column[s];
            }
            row.mean = sum / static_cast<double>(column.size());
            row.p10 = nearest_rank_percentile(column, 10.0);
            row.p90 = nearest_rank_percentile(column, 90.0);
        }
        data.rows.push_back(row);
    }
    return data;
}

void write_plot_csv(std::ostream& out, const PlotData& data) {
    auto cell = [](const std::optional<double>& v) { return v ? format_g12(*v) : std::string{}; };
    out << "# percentiles: nearest-rank across scenarios\n";
    out << "year,observed_total,ensemble_mean,ensemble_p10,ensemble_p90\n";
    for (const auto& r : data.rows) {
        out << r.year << ',' << cell(r.observed) << ',' << cell(r.mean) << ',' << cell(r.p10) << ','
            << cell(r.p90) << '\n';
    }
}

std::vector<std::string> emit_plot_data(const YearlySeries& observed, const ScenarioEnsemble& ensemble,
                                        const std::filesystem::path& destination) {
    const auto data = plot_data(observed, ensemble);
    auto temp = destination;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::io, "cannot write " + temp.string());
        write_plot_csv(out, data);
        out.flush();
        if (!out) throw Error(Errc::io, "failed writing " + temp.string());
    }
    std::error_code ec;
    std::filesystem::rename(temp, destination, ec);
    if (ec) {
        std::filesystem::remove(temp, ec);
        throw Error(Errc::io, "cannot write " + destination.string());
    }
    return data.warnings;
}

}  // namespace raingen
