#pragma once

#include <cstddef>
#include <span>

namespace raingen {

struct LjungBoxResult {
    double statistic = 0.0;  ///< Q = n(n+2) * sum_k r_k^2 / (n-k)
    double p_value = 1.0;    ///< upper chi-square tail at `dof`
    std::size_t lags = 0;
    std::size_t dof = 0;
};

/// Sample autocorrelation at `lag` about the sample mean. Returns 0 for a
/// zero-variance sample.
[[nodiscard]] double autocorrelation(std::span<const double> x, std::size_t lag);

/// Ljung-Box portmanteau test. Requires 1 <= lags < x.size() and dof >= 1.
[[nodiscard]] LjungBoxResult ljung_box_test(std::span<const double> x, std::size_t lags, std::size_t dof);

/// P(X > x) for X ~ chi-square(dof).
[[nodiscard]] double chi_square_upper_tail(double x, double dof);

}  // namespace raingen
