#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raingen/ljung_box.hpp"
#include "raingen/random.hpp"

namespace raingen {

/// ARMA(p, q) around a constant mean:
///
///   w_t = sum_i ar[i] * w_{t-1-i} + e_t + sum_j ma[j] * e_{t-1-j},   w_t = x_t - mean
///
/// with e_t ~ N(0, noise_variance).
struct ArmaModel {
    std::size_t p = 0;
    std::size_t q = 0;
    double mean = 0.0;
    std::vector<double> ar_coeffs;
    std::vector<double> ma_coeffs;
    double noise_variance = 0.0;
    std::size_t n_fit = 0;

    // fit diagnostics
    double sse = 0.0;
    std::size_t iterations = 0;
    std::size_t restarts = 0;
    bool converged = true;
};

struct FitOptions {
    std::size_t max_iterations = 200;
    double tolerance = 1e-12;
    std::size_t restarts = 5;
    double restart_jitter = 0.3;
    /// Every AR and MA root must satisfy |z| > this radius.
    double min_root_modulus = 1.0;
};

/// Shortest series fit_arma accepts for the given orders.
[[nodiscard]] constexpr std::size_t min_fit_length(std::size_t p, std::size_t q) noexcept {
    const std::size_t scaled = 4 * (p + q + 1);
    return scaled > 8 ? scaled : 8;
}

/// True when every root of 1 - sum_i a[i] z^(i+1) lies strictly outside the
/// unit circle (Schur-Cohn step-down on the reflection coefficients).
[[nodiscard]] bool roots_outside_unit_circle(std::span<const double> a);
/// Same test for the circle of the given radius (scaled coefficients).
[[nodiscard]] bool roots_outside_radius(std::span<const double> a, double radius);
[[nodiscard]] bool is_stationary(const ArmaModel& model);
[[nodiscard]] bool is_invertible(const ArmaModel& model);

/// Conditional-sum-of-squares fit: residual recursion with zero pre-sample
/// values and residuals, minimised by Levenberg-Marquardt from the zero
/// vector. Candidate points outside the stationary/invertible region are
/// rejected. Falls back to jittered restarts when the first run fails.
[[nodiscard]] ArmaModel fit_arma(std::span<const double> series, std::size_t p, std::size_t q,
                                 const FitOptions& options = {});

/// Innovations implied by the model on `series` (same recursion as fitting).
[[nodiscard]] std::vector<double> arma_residuals(const ArmaModel& model, std::span<const double> series);

/// n ln(sigma^2) + 2 (p + q + 1). -inf for a zero-variance fit.
[[nodiscard]] double aic_score(const ArmaModel& model);
/// sigma^2 (n + p + q + 1) / (n - p - q - 1).
[[nodiscard]] double fpe_score(const ArmaModel& model);
/// Zero noise variance: the scores are not informative.
[[nodiscard]] bool is_degenerate(const ArmaModel& model) noexcept;

struct WhitenessResult {
    LjungBoxResult test;
    double alpha = 0.05;
    bool pass = false;
};

/// Ljung-Box on the fit residuals; passes when p > alpha. `lags` defaults to
/// min(10, n/5); degrees of freedom are lags - p - q, floored at 1.
[[nodiscard]] WhitenessResult residual_whiteness(const ArmaModel& model, std::span<const double> series,
                                                 std::optional<std::size_t> lags = std::nullopt,
                                                 double alpha = 0.05);

struct OrderScore {
    std::size_t p = 0;
    std::size_t q = 0;
    bool ok = false;
    double aic = 0.0;
    double fpe = 0.0;
    double noise_variance = 0.0;
    std::string failure;
};

struct OrderSelection {
    std::size_t p = 0;
    std::size_t q = 0;
    ArmaModel model;
    std::vector<OrderScore> scores;  ///< row-major over p, then q
    WhitenessResult whiteness;
    bool adequate = false;
};

struct SelectOptions {
    std::size_t max_p = 3;
    std::size_t max_q = 3;
    FitOptions fit;
    /// Fits with an AR or MA root inside this radius are treated as failed
    /// grid points (near-cancelling factors sitting on the boundary).
    double min_root_modulus = 1.01;
    std::size_t threads = 1;
};

/// Fits every (p, q) on the grid and picks minimal AIC, then FPE, then
/// smaller p + q, then smaller p. Grid points the series is too short for,
/// whose fit fails, or whose roots sit near the unit circle are recorded and
/// skipped. The result does not depend
/// on `threads`.
[[nodiscard]] OrderSelection select_order(std::span<const double> series, const SelectOptions& options = {});

/// Gaussian-innovation simulation; 10 (p + q + 1) burn-in steps are discarded.
[[nodiscard]] std::vector<double> simulate(const ArmaModel& model, std::size_t length, Rng& rng);

[[nodiscard]] std::string model_to_json(const ArmaModel& model);
[[nodiscard]] ArmaModel model_from_json(const std::string& text);

}  // namespace raingen
