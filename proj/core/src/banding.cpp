#include "raingen/banding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "raingen/error.hpp"

namespace raingen {
namespace {

double mean_of(std::span<const double> totals, const std::vector<std::size_t>& indices) {
    double sum = 0.0;
    for (auto i : indices) sum += totals[i];
    return sum / static_cast<double>(indices.size());
}

bool converged(double previous, double current, double tolerance) {
    if (previous == 0.0) return current == 0.0;
    return std::abs(current - previous) / std::abs(previous) <= tolerance;
}

void check_config(const BandingConfig& config) {
    if (!(config.trim_fraction >= 0.0 && config.trim_fraction < 0.5)) {
        throw Error(Errc::invalid_argument, "trim fraction must be in [0, 0.5)");
    }
    if (!(config.wet_split_fraction > 0.0 && config.wet_split_fraction < 1.0)) {
        throw Error(Errc::invalid_argument, "wet split fraction must be in (0, 1)");
    }
    if (!(config.min_retained_fraction > 0.0 && config.min_retained_fraction <= 1.0)) {
        throw Error(Errc::invalid_argument, "retention floor must be in (0, 1]");
    }
}

}  // namespace

std::string_view to_string(RainfallClass c) noexcept {
    switch (c) {
        case RainfallClass::VeryDry: return "very_dry";
        case RainfallClass::Dry: return "dry";
        case RainfallClass::NormalDown: return "normal_down";
        case RainfallClass::NormalUp: return "normal_up";
        case RainfallClass::Wet: return "wet";
        case RainfallClass::VeryWet: return "very_wet";
    }
    return "unknown";
}

std::optional<RainfallClass> class_from_string(std::string_view name) noexcept {
    for (auto c : kAllClasses) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

std::string_view to_string(NormalLimitResult::StopReason reason) noexcept {
    switch (reason) {
        case NormalLimitResult::StopReason::converged: return "converged";
        case NormalLimitResult::StopReason::nothing_eliminated: return "nothing_eliminated";
        case NormalLimitResult::StopReason::retention_floor: return "retention_floor";
    }
    return "unknown";
}

NormalLimitResult compute_normal_limit(std::span<const double> totals, const BandingConfig& config) {
    check_config(config);
    const auto n = totals.size();
    if (n < kMinYearsForBanding) {
        throw Error(Errc::too_short, "normal limit needs at least " + std::to_string(kMinYearsForBanding) +
                                         " years, got " + std::to_string(n));
    }
    for (double v : totals) {
        if (!std::isfinite(v) || v < 0.0) throw Error(Errc::invalid_argument, "yearly totals must be finite and >= 0");
    }

    NormalLimitResult result;
    result.retained_indices.resize(n);
    std::iota(result.retained_indices.begin(), result.retained_indices.end(), std::size_t{0});
    double mean = mean_of(totals, result.retained_indices);
    result.history.push_back(mean);
    result.iterations = 1;

    const double floor = config.min_retained_fraction * static_cast<double>(n);
    while (true) {
        const auto [lo_it, hi_it] = std::minmax_element(
            result.retained_indices.begin(), result.retained_indices.end(),
            [&](std::size_t a, std::size_t b) { return totals[a] < totals[b]; });
        const double lo = totals[*lo_it];
        const double hi = totals[*hi_it];
        const double cut_lo = lo + config.trim_fraction * (hi - lo);
        const double cut_hi = hi - config.trim_fraction * (hi - lo);

        std::vector<std::size_t> kept;
        kept.reserve(result.retained_indices.size());
        for (auto i : result.retained_indices) {
            if (totals[i] >= cut_lo && totals[i] <= cut_hi) kept.push_back(i);
        }
        if (kept.size() == result.retained_indices.size()) {
            result.stop_reason = NormalLimitResult::StopReason::nothing_eliminated;
            break;
        }
        if (static_cast<double>(kept.size()) < floor) {
            result.stop_reason = NormalLimitResult::StopReason::retention_floor;
            break;
        }
        const double next = mean_of(totals, kept);
        result.retained_indices = std::move(kept);
        result.history.push_back(next);
        ++result.iterations;
        const bool done = converged(mean, next, config.convergence_tolerance);
        mean = next;
        if (done) {
            result.stop_reason = NormalLimitResult::StopReason::converged;
            break;
        }
    }
    result.normal_limit = mean;
    return result;
}

NormalLimitResult compute_normal_limit(const YearlySeries& yearly, const BandingConfig& config) {
    return compute_normal_limit(std::span<const double>(yearly.totals), config);
}

ClassBands derive_bands(const NormalLimitResult& limit, std::span<const double> totals,
                        const BandingConfig& config) {
    check_config(config);
    if (totals.empty() || limit.retained_indices.empty()) {
        throw Error(Errc::invalid_argument, "bands need a non-empty series and normal set");
    }
    ClassBands bands;
    bands.normal_limit = limit.normal_limit;
    bands.normal_lower = totals[limit.retained_indices.front()];
    bands.normal_upper = bands.normal_lower;
    for (auto i : limit.retained_indices) {
        if (i >= totals.size()) throw Error(Errc::invalid_argument, "retained index out of range");
        bands.normal_lower = std::min(bands.normal_lower, totals[i]);
        bands.normal_upper = std::max(bands.normal_upper, totals[i]);
    }
    const auto [lo, hi] = std::minmax_element(totals.begin(), totals.end());
    bands.observed_min = *lo;
    bands.observed_max = *hi;
    bands.wet_split = bands.normal_upper + config.wet_split_fraction * (bands.observed_max - bands.normal_upper);
    return bands;
}

ClassBands derive_bands(const NormalLimitResult& limit, const YearlySeries& yearly, const BandingConfig& config) {
    return derive_bands(limit, std::span<const double>(yearly.totals), config);
}

RainfallClass classify_year(double value, const ClassBands& bands) {
    if (!std::isfinite(value) || value < 0.0) {
        throw Error(Errc::invalid_argument, "cannot classify a negative or non-finite yearly total");
    }
    if (value == 0.0) return RainfallClass::VeryDry;
    if (value < bands.normal_lower) return RainfallClass::Dry;
    if (value < bands.normal_limit) return RainfallClass::NormalDown;
    if (value <= bands.normal_upper) return RainfallClass::NormalUp;
    if (value <= bands.wet_split) return RainfallClass::Wet;
    return RainfallClass::VeryWet;
}

ClassFrequencies compute_frequencies(std::span<const double> totals, const ClassBands& bands) {
    ClassFrequencies out;
    for (double v : totals) ++out.counts[index_of(classify_year(v, bands))];
    out.total = totals.size();
    return out;
}

ClassFrequencies compute_frequencies(const YearlySeries& yearly, const ClassBands& bands) {
    return compute_frequencies(std::span<const double>(yearly.totals), bands);
}

}  // namespace raingen
