#include "raingen/seasonality.hpp"

#include <cmath>
#include <ostream>

#include "raingen/error.hpp"
#include "raingen/format.hpp"

namespace raingen {

SeasonalityFactors compute_seasonality(const MonthlySeries& series, const YearlySeries& yearly) {
    if (yearly.size() != series.years() || series.values.size() != 12 * yearly.size()) {
        throw Error(Errc::invalid_argument, "yearly series does not match the monthly series");
    }
    SeasonalityFactors out;
    out.start_month = series.start_month;
    std::array<double, 12> sums{};
    for (std::size_t y = 0; y < yearly.size(); ++y) {
        const double total = yearly.totals[y];
        if (total <= 0.0) continue;
        for (std::size_t m = 0; m < 12; ++m) sums[m] += series.values[12 * y + m] / total;
        ++out.years_used;
    }
    if (out.years_used == 0) {
        throw Error(Errc::degenerate, "every year total is zero; no basis for a monthly distribution");
    }
    const auto used = static_cast<double>(out.years_used);
    for (std::size_t m = 0; m < 12; ++m) out.factors[m] = sums[m] / used;
    return out;
}

std::array<double, 12> disaggregate(double total, const SeasonalityFactors& factors) {
    if (!(total >= 0.0) || !std::isfinite(total)) {
        throw Error(Errc::invalid_argument, "yearly total must be finite and non-negative");
    }
    std::array<double, 12> months{};
    for (std::size_t m = 0; m < 12; ++m) months[m] = total * factors.factors[m];
    return months;
}

void write_seasonality_csv(std::ostream& out, const SeasonalityFactors& factors) {
    out << "month,factor\n";
    for (std::size_t m = 0; m < 12; ++m) {
        out << factors.calendar_month(m) << ',' << format_roundtrip(factors.factors[m]) << '\n';
    }
}

}  // namespace raingen
