#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raingen/banding.hpp"
#include "raingen/ingest.hpp"
#include "raingen/scenario.hpp"

namespace raingen {

struct SummaryStats {
    double mean = 0.0;
    /// Unbiased (n - 1) variance; empty when n == 1.
    std::optional<double> variance;
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
    double zero_year_fraction = 0.0;
};

/// Throws Error(Errc::invalid_argument) for empty input.
[[nodiscard]] SummaryStats summarize(std::span<const double> totals);

/// |observed - generated| / max(|observed|, 1e-12).
[[nodiscard]] double relative_difference(double observed, double generated) noexcept;

struct ClassComparison {
    RainfallClass cls = RainfallClass::VeryDry;
    double observed = 0.0;
    double generated = 0.0;
    double delta = 0.0;  ///< generated - observed
};

struct ComparisonReport {
    SummaryStats observed;
    SummaryStats pooled;
    std::vector<SummaryStats> per_scenario;
    double mean_relative_difference = 0.0;
    std::optional<double> variance_relative_difference;
    std::array<ClassComparison, 6> classes{};
};

/// Moments and class frequencies of the observed record against the pooled
/// ensemble, both classified under the ensemble's bands.
[[nodiscard]] ComparisonReport compare(const YearlySeries& observed, const ScenarioEnsemble& ensemble);

struct PlotRow {
    std::size_t year = 0;
    std::optional<double> observed;
    std::optional<double> mean;
    std::optional<double> p10;
    std::optional<double> p90;
};

struct PlotData {
    std::vector<PlotRow> rows;
    std::vector<std::string> warnings;
};

/// Nearest-rank percentile: the ceil(pct/100 * n)-th smallest value.
[[nodiscard]] double nearest_rank_percentile(std::vector<double> values, double pct);

[[nodiscard]] PlotData plot_data(const YearlySeries& observed, const ScenarioEnsemble& ensemble);
void write_plot_csv(std::ostream& out, const PlotData& data);

/// Writes the plot CSV to `destination` through a temporary file and
/// rename. Returns the warnings attached to the data.
std::vector<std::string> emit_plot_data(const YearlySeries& observed, const ScenarioEnsemble& ensemble,
                                        const std::filesystem::path& destination);

[[nodiscard]] std::string comparison_to_json(const ComparisonReport& report);

}  // namespace raingen
