#include "raingen/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "raingen/error.hpp"

namespace raingen {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::parse: return "parse";
        case Errc::validation: return "validation";
        case Errc::too_short: return "too_short";
        case Errc::fit_failed: return "fit_failed";
        case Errc::degenerate: return "degenerate";
        case Errc::io: return "io";
    }
    return "unknown";
}

std::string format_roundtrip(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error(Errc::invalid_argument, "cannot format value");
    return std::string(buf.data(), end);
}

std::string format_g12(double value) {
    if (value == 0.0) return "0";  // folds -0
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 12);
    if (ec != std::errc{}) throw Error(Errc::invalid_argument, "cannot format value");
    return std::string(buf.data(), end);
}

std::string_view trim(std::string_view text) noexcept {
    constexpr std::string_view ws = " \t\r\n";
    const auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(ws);
    return text.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value,
                                     std::chars_format::general);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<long long> parse_integer(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

}  // namespace raingen
