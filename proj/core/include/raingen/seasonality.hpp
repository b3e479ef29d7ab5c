#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>

#include "raingen/ingest.hpp"

namespace raingen {

/// Deterministic share of a year's total falling in each month.
///
/// `factors[k]` belongs to the k-th month of the model year, i.e. calendar
/// month `(start_month - 1 + k) % 12 + 1`.
struct SeasonalityFactors {
    std::array<double, 12> factors{};
    std::size_t years_used = 0;
    int start_month = 1;

    [[nodiscard]] int calendar_month(std::size_t month_in_year) const noexcept {
        return static_cast<int>((static_cast<std::size_t>(start_month - 1) + month_in_year) % 12) + 1;
    }
};

/// Mean over years of month/year ratios. Years whose total is zero carry no
/// shape information and are skipped. Throws Error(Errc::degenerate) when
/// every year total is zero.
[[nodiscard]] SeasonalityFactors compute_seasonality(const MonthlySeries& series,
                                                     const YearlySeries& yearly);

/// Splits a yearly total into 12 monthly depths using the factors.
[[nodiscard]] std::array<double, 12> disaggregate(double total, const SeasonalityFactors& factors);

/// `month,factor` audit table, one row per calendar month in model-year order.
void write_seasonality_csv(std::ostream& out, const SeasonalityFactors& factors);

}  // namespace raingen
