#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "raingen/ingest.hpp"

namespace raingen {

/// The six rainfall sets. VeryDry is the exact-zero year only.
enum class RainfallClass { VeryDry, Dry, NormalDown, NormalUp, Wet, VeryWet };

inline constexpr std::array<RainfallClass, 6> kAllClasses = {
    RainfallClass::VeryDry, RainfallClass::Dry,  RainfallClass::NormalDown,
    RainfallClass::NormalUp, RainfallClass::Wet, RainfallClass::VeryWet};

/// Classes replaced by random injection in generated scenarios.
inline constexpr std::array<RainfallClass, 4> kExtremeClasses = {
    RainfallClass::VeryDry, RainfallClass::Dry, RainfallClass::Wet, RainfallClass::VeryWet};

[[nodiscard]] std::string_view to_string(RainfallClass c) noexcept;
[[nodiscard]] std::optional<RainfallClass> class_from_string(std::string_view name) noexcept;
[[nodiscard]] constexpr std::size_t index_of(RainfallClass c) noexcept { return static_cast<std::size_t>(c); }
[[nodiscard]] constexpr bool is_normal(RainfallClass c) noexcept {
    return c == RainfallClass::NormalDown || c == RainfallClass::NormalUp;
}

struct BandingConfig {
    /// Fraction of the current range trimmed from each end per iteration.
    double trim_fraction = 0.10;
    /// Relative change of the mean at or below which the iteration stops.
    double convergence_tolerance = 0.10;
    /// Minimum retained share of the original sample.
    double min_retained_fraction = 0.50;
    /// Position of the wet/very-wet split inside [normal_upper, observed_max].
    double wet_split_fraction = 0.5;
};

struct NormalLimitResult {
    double normal_limit = 0.0;
    std::size_t iterations = 0;
    std::vector<std::size_t> retained_indices;
    std::vector<double> history;

    enum class StopReason { converged, nothing_eliminated, retention_floor };
    StopReason stop_reason = StopReason::nothing_eliminated;
};

[[nodiscard]] std::string_view to_string(NormalLimitResult::StopReason reason) noexcept;

struct ClassBands {
    double normal_lower = 0.0;
    double normal_upper = 0.0;
    double wet_split = 0.0;
    double observed_min = 0.0;
    double observed_max = 0.0;
    double normal_limit = 0.0;
};

struct ClassFrequencies {
    std::array<std::size_t, 6> counts{};
    std::size_t total = 0;

    [[nodiscard]] std::size_t count(RainfallClass c) const noexcept { return counts[index_of(c)]; }
    /// counts/N; the exact rational is (count(c), total).
    [[nodiscard]] double frequency(RainfallClass c) const noexcept {
        return total == 0 ? 0.0 : static_cast<double>(count(c)) / static_cast<double>(total);
    }
};

/// Smallest sample the trimming procedure accepts.
inline constexpr std::size_t kMinYearsForBanding = 4;

/// Iterative trimmed mean: trims values outside the central part of the
/// current [min, max] range and recomputes the mean until the mean moves by
/// at most the tolerance, nothing is trimmed, or trimming would drop the
/// sample below the retention floor (that step is then not applied).
[[nodiscard]] NormalLimitResult compute_normal_limit(std::span<const double> totals,
                                                     const BandingConfig& config = {});
[[nodiscard]] NormalLimitResult compute_normal_limit(const YearlySeries& yearly,
                                                     const BandingConfig& config = {});

[[nodiscard]] ClassBands derive_bands(const NormalLimitResult& limit, std::span<const double> totals,
                                      const BandingConfig& config = {});
[[nodiscard]] ClassBands derive_bands(const NormalLimitResult& limit, const YearlySeries& yearly,
                                      const BandingConfig& config = {});

/// Throws Error(Errc::invalid_argument) for a negative or non-finite value.
[[nodiscard]] RainfallClass classify_year(double value, const ClassBands& bands);

[[nodiscard]] ClassFrequencies compute_frequencies(std::span<const double> totals, const ClassBands& bands);
[[nodiscard]] ClassFrequencies compute_frequencies(const YearlySeries& yearly, const ClassBands& bands);

/// Band edges, counts and iteration history as a JSON document.
[[nodiscard]] std::string banding_to_json(const NormalLimitResult& limit, const ClassBands& bands,
                                          const ClassFrequencies& frequencies);

}  // namespace raingen
