#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace raingen {

/// Ordered monthly precipitation record (mm) for one station.
///
/// `values[12 * y + k]` is the k-th month of model year y, where the first
/// month of every model year is `start_month`.
struct MonthlySeries {
    std::string station_id;
    int start_year = 0;
    int start_month = 1;
    std::vector<double> values;

    [[nodiscard]] std::size_t years() const noexcept { return values.size() / 12; }
    [[nodiscard]] double at(std::size_t year, std::size_t month_in_year) const {
        return values.at(12 * year + month_in_year);
    }

    friend bool operator==(const MonthlySeries&, const MonthlySeries&) = default;
};

/// Yearly totals (mm) aggregated from a MonthlySeries.
struct YearlySeries {
    std::string station_id;
    int start_year = 0;
    std::vector<double> totals;

    [[nodiscard]] std::size_t size() const noexcept { return totals.size(); }
};

struct Finding {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> errors;
    std::vector<Finding> warnings;

    [[nodiscard]] bool accepted() const noexcept { return errors.empty(); }
    [[nodiscard]] bool has_error(std::string_view code) const;
    [[nodiscard]] bool has_warning(std::string_view code) const;
};

struct ParseOptions {
    /// Calendar month that opens each model year (1 = calendar years).
    int year_start_month = 1;
};

/// Parses the `station,year,month,precip_mm` CSV schema.
///
/// Rows may arrive in any order; they are sorted by (year, month). The record
/// must be contiguous, begin at `year_start_month` and cover whole years.
/// Throws Error(Errc::parse) naming the offending line.
[[nodiscard]] MonthlySeries parse_monthly_csv(std::istream& source, const ParseOptions& options = {});

/// Writes the series back in the schema accepted by parse_monthly_csv. Values
/// use the shortest decimal text that round-trips to the same double.
void write_monthly_csv(std::ostream& out, const MonthlySeries& series);

/// Relative trend slope above which validate_series warns (fraction of mean per year).
inline constexpr double kTrendWarningFraction = 0.01;

[[nodiscard]] ValidationReport validate_series(const MonthlySeries& series);

/// Sums each block of 12 months. Throws Error(Errc::validation) for invalid series.
[[nodiscard]] YearlySeries aggregate_yearly(const MonthlySeries& series);

/// Ordinary least-squares slope of values against their index.
[[nodiscard]] double ols_slope(std::span<const double> values);

}  // namespace raingen
