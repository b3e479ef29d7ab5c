#include "raingen/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "raingen/error.hpp"
#include "raingen/format.hpp"

namespace raingen {
namespace {

constexpr std::string_view kHeader = "station,year,month,precip_mm";

struct Row {
    long long year;
    long long month;
    double value;
    std::size_t line;
};

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw Error(Errc::parse, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

}  // namespace

bool ValidationReport::has_error(std::string_view code) const {
    return std::any_of(errors.begin(), errors.end(), [&](const Finding& f) { return f.code == code; });
}

bool ValidationReport::has_warning(std::string_view code) const {
    return std::any_of(warnings.begin(), warnings.end(), [&](const Finding& f) { return f.code == code; });
}

MonthlySeries parse_monthly_csv(std::istream& source, const ParseOptions& options) {
    if (options.year_start_month < 1 || options.year_start_month > 12) {
        throw Error(Errc::invalid_argument, "year start month must be in 1..12");
    }

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(source, line)) {
        ++line_no;
        std::string_view text = line;
        if (line_no == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
        text = trim(text);
        if (text.empty()) continue;
        if (text != kHeader) fail(line_no, "expected header '" + std::string(kHeader) + "'");
        have_header = true;
        break;
    }
    if (!have_header) throw Error(Errc::parse, "empty input: missing header");

    std::string station;
    bool have_station = false;
    std::vector<Row> rows;
    while (std::getline(source, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        const auto fields = split_fields(text);
        if (fields.size() != 4) fail(line_no, "malformed row: expected 4 fields");

        const std::string id(trim(fields[0]));
        if (!have_station) {
            station = id;
            have_station = true;
        } else if (id != station) {
            fail(line_no, "multiple stations in one file ('" + station + "' and '" + id + "')");
        }
        const auto year = parse_integer(fields[1]);
        if (!year) fail(line_no, "non-numeric year '" + std::string(trim(fields[1])) + "'");
        const auto month = parse_integer(fields[2]);
        if (!month) fail(line_no, "non-numeric month '" + std::string(trim(fields[2])) + "'");
        if (*month < 1 || *month > 12) fail(line_no, "month out of range 1..12");
        const auto value = parse_double(fields[3]);
        if (!value) fail(line_no, "non-numeric value '" + std::string(trim(fields[3])) + "'");
        if (*value < 0.0) fail(line_no, "negative value");
        rows.push_back({*year, *month, *value, line_no});
    }
    if (rows.empty()) throw Error(Errc::parse, "no data rows");

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.year != b.year ? a.year < b.year : a.month < b.month;
    });
    auto ordinal = [](const Row& r) { return r.year * 12 + (r.month - 1); };
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto step = ordinal(rows[i]) - ordinal(rows[i - 1]);
        if (step == 0) {
            fail(rows[i].line, "duplicate (year, month) " + std::to_string(rows[i].year) + "-" +
                                   std::to_string(rows[i].month));
        }
        if (step != 1) {
            fail(rows[i].line, "gap in months before " + std::to_string(rows[i].year) + "-" +
                                   std::to_string(rows[i].month));
        }
    }
    if (rows.front().month != options.year_start_month) {
        throw Error(Errc::parse, "gap/incomplete year: record starts at month " +
                                     std::to_string(rows.front().month) + " but years start at month " +
                                     std::to_string(options.year_start_month));
    }
    if (rows.size() % 12 != 0) {
        throw Error(Errc::parse, "gap/incomplete year: " + std::to_string(rows.size()) +
                                     " months is not a whole number of years");
    }

    MonthlySeries series;
    series.station_id = station;
    series.start_year = static_cast<int>(rows.front().year);
    series.start_month = static_cast<int>(rows.front().month);
    series.values.reserve(rows.size());
    for (const auto& r : rows) series.values.push_back(r.value);
    return series;
}

void write_monthly_csv(std::ostream& out, const MonthlySeries& series) {
    out << kHeader << '\n';
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const auto offset = static_cast<long long>(series.start_month - 1) + static_cast<long long>(i);
        const long long year = series.start_year + offset / 12;
        const long long month = offset % 12 + 1;
        out << series.station_id << ',' << year << ',' << month << ','
            << format_roundtrip(series.values[i]) << '\n';
    }
}

double ols_slope(std::span<const double> values) {
    const auto n = values.size();
    if (n < 2) return 0.0;
    const double x_mean = static_cast<double>(n - 1) / 2.0;
    const double y_mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - x_mean;
        sxy += dx * (values[i] - y_mean);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

ValidationReport validate_series(const MonthlySeries& series) {
    ValidationReport report;
    const auto n = series.values.size();
    if (n == 0) report.errors.push_back({"empty", "series has no values"});
    if (n % 12 != 0) {
        report.errors.push_back(
            {"length_not_multiple_of_12", "length " + std::to_string(n) + " is not a multiple of 12"});
    }
    if (series.start_month < 1 || series.start_month > 12) {
        report.errors.push_back({"bad_start_month", "start month must be in 1..12"});
    }
    std::size_t missing = 0;
    std::size_t negative = 0;
    for (double v : series.values) {
        if (!std::isfinite(v)) {
            ++missing;
        } else if (v < 0.0) {
            ++negative;
        }
    }
    if (missing > 0) {
        report.errors.push_back({"missing_value", std::to_string(missing) + " missing or non-finite value(s)"});
    }
    if (negative > 0) {
        report.errors.push_back({"negative_value", std::to_string(negative) + " negative value(s)"});
    }
    if (!report.accepted()) return report;

    std::vector<double> totals(series.years(), 0.0);
    for (std::size_t i = 0; i < n; ++i) totals[i / 12] += series.values[i];
    const double mean = std::accumulate(totals.begin(), totals.end(), 0.0) / static_cast<double>(totals.size());
    const double slope = ols_slope(totals);
    if (mean > 0.0 && std::abs(slope) > kTrendWarningFraction * mean) {
        std::ostringstream msg;
        msg << "yearly totals trend by " << format_g12(slope) << " mm/yr (mean " << format_g12(mean)
            << " mm); detrend before modelling";
        report.warnings.push_back({"trend", msg.str()});
    }
    return report;
}

YearlySeries aggregate_yearly(const MonthlySeries& series) {
    const auto report = validate_series(series);
    if (!report.accepted()) {
        throw Error(Errc::validation, "invalid monthly series: " + report.errors.front().message);
    }
    YearlySeries out;
    out.station_id = series.station_id;
    out.start_year = series.start_year;
    out.totals.assign(series.years(), 0.0);
    for (std::size_t y = 0; y < out.totals.size(); ++y) {
        double sum = 0.0;
        for (std::size_t m = 0; m < 12; ++m) sum += series.values[12 * y + m];
        out.totals[y] = sum;
    }
    return out;
}

}  // namespace raingen
