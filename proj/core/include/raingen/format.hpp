#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace raingen {

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] std::string format_roundtrip(double value);

/// Up to 12 significant digits, `.` separator, no locale dependence.
[[nodiscard]] std::string format_g12(double value);

/// Strict decimal parse of the whole field; nullopt on any trailing garbage,
/// empty input, or non-finite result.
[[nodiscard]] std::optional<double> parse_double(std::string_view text);
[[nodiscard]] std::optional<long long> parse_integer(std::string_view text);

[[nodiscard]] std::string_view trim(std::string_view text) noexcept;

}  // namespace raingen
