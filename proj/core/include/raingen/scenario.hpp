#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raingen/arma.hpp"
#include "raingen/banding.hpp"
#include "raingen/ingest.hpp"
#include "raingen/random.hpp"
#include "raingen/seasonality.hpp"

namespace raingen {

struct Removal {
    std::size_t index = 0;
    RainfallClass cls = RainfallClass::VeryDry;
    double value = 0.0;
};

/// Historical yearly series with every non-normal year taken out.
struct ModifiedSeries {
    std::vector<double> totals;
    std::vector<std::size_t> retained_indices;
    std::vector<Removal> removed;
};

/// Fewest normal years build_modified_series accepts.
inline constexpr std::size_t kMinModifiedYears = 4;

[[nodiscard]] ModifiedSeries build_modified_series(std::span<const double> totals, const ClassBands& bands);

struct Injection {
    std::size_t position = 0;
    RainfallClass cls = RainfallClass::VeryDry;
    double value = 0.0;
};

struct YearlyScenario {
    std::vector<double> totals;
    /// Simulated values after clamping, before injection.
    std::vector<double> base;
    std::vector<Injection> injected;
    std::size_t clamped = 0;
    std::vector<std::string> warnings;
};

struct InjectionConfig {
    /// round(f * L) per class instead of Binomial(L, f).
    bool deterministic_counts = false;
    /// Binomial redraws allowed when the class counts exceed L.
    std::size_t max_redraws = 100;
};

/// Simulates L years from the model, clamps negative values to the normal
/// lower edge, then overwrites randomly chosen years with wet and dry values
/// drawn uniformly from their class intervals at the given frequencies.
[[nodiscard]] YearlyScenario generate_yearly_scenario(const ArmaModel& model, const ClassFrequencies& frequencies,
                                                      const ClassBands& bands, std::size_t years, Rng& rng,
                                                      const InjectionConfig& config = {});

/// Everything a scenario generator needs; immutable once built.
struct Provenance {
    ClassBands bands;
    ClassFrequencies frequencies;
    ArmaModel model;
    SeasonalityFactors seasonality;
    /// False for the direct branch, where the model saw the whole record.
    bool inject_extremes = true;
};

struct Scenario {
    YearlyScenario yearly;
    std::vector<std::array<double, 12>> monthly;
};

struct ScenarioEnsemble {
    std::vector<Scenario> scenarios;
    std::uint64_t master_seed = 0;
    std::size_t years = 0;
    Provenance provenance;

    [[nodiscard]] std::size_t clamp_count() const noexcept;
};

struct EnsembleOptions {
    InjectionConfig injection;
    std::size_t threads = 1;
};

/// Scenario i draws from make_stream(master_seed, i), so the ensemble is
/// identical for any thread count.
[[nodiscard]] ScenarioEnsemble generate_ensemble(const Provenance& provenance, std::size_t scenarios,
                                                 std::size_t years, std::uint64_t master_seed,
                                                 const EnsembleOptions& options = {});

enum class Branch { direct, banded };
[[nodiscard]] std::string_view to_string(Branch branch) noexcept;

struct PipelineConfig {
    ParseOptions parse;
    BandingConfig banding;
    SelectOptions select;
    InjectionConfig injection;
    std::size_t scenarios = 100;
    std::optional<std::size_t> years;  ///< defaults to the record length
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

/// Intermediate artifacts of the modelling flow.
struct PipelineReport {
    ValidationReport validation;
    YearlySeries yearly;
    SeasonalityFactors seasonality;
    std::optional<OrderSelection> direct_selection;
    std::string direct_failure;
    Branch branch = Branch::banded;
    NormalLimitResult normal_limit;
    ClassBands bands;
    ClassFrequencies frequencies;
    std::optional<ModifiedSeries> modified;
    std::optional<OrderSelection> modified_selection;
    ArmaModel model;

    // filled by generation
    std::size_t scenarios = 0;
    std::size_t years = 0;
    std::uint64_t seed = 0;
    std::size_t clamp_count = 0;
    std::vector<std::string> warnings;

    [[nodiscard]] Provenance provenance() const;
};

/// Aggregation, seasonality, the direct ARMA attempt and, when that model's
/// residuals are not white, banding plus a fit on the modified series.
/// Errors are rethrown as PipelineError naming the stage.
[[nodiscard]] PipelineReport analyze_series(const MonthlySeries& series, const PipelineConfig& config);

struct PipelineResult {
    ScenarioEnsemble ensemble;
    PipelineReport report;
};

[[nodiscard]] PipelineResult run_pipeline(const MonthlySeries& series, const PipelineConfig& config);

/// `scenario,year,month,precip_mm`; years are numbered 1..L within each
/// scenario and months are calendar months.
void write_ensemble_monthly_csv(std::ostream& out, const ScenarioEnsemble& ensemble);
/// `scenario,year,total_mm,class_injected` (`none` for simulated years).
void write_ensemble_yearly_csv(std::ostream& out, const ScenarioEnsemble& ensemble);
/// Reads a yearly ensemble CSV back into totals and injections. Provenance
/// is left for the caller to attach.
[[nodiscard]] ScenarioEnsemble read_ensemble_yearly_csv(std::istream& in);

[[nodiscard]] std::string pipeline_report_to_json(const PipelineReport& report);
[[nodiscard]] std::string selection_to_json(const OrderSelection& selection);

}  // namespace raingen
