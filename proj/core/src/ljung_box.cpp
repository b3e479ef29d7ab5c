#include "raingen/ljung_box.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <numeric>

#include "raingen/error.hpp"

namespace raingen {

double autocorrelation(std::span<const double> x, std::size_t lag) {
    const auto n = x.size();
    if (n == 0 || lag >= n) return 0.0;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (denom == 0.0) return 0.0;
    double num = 0.0;
    for (std::size_t t = lag; t < n; ++t) num += (x[t] - mean) * (x[t - lag] - mean);
    return num / denom;
}

double chi_square_upper_tail(double x, double dof) {
    if (!(dof > 0.0)) throw Error(Errc::invalid_argument, "chi-square degrees of freedom must be positive");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

LjungBoxResult ljung_box_test(std::span<const double> x, std::size_t lags, std::size_t dof) {
    const auto n = x.size();
    if (lags == 0 || lags >= n) {
        throw Error(Errc::too_short, "Ljung-Box needs 1 <= lags < n (lags " + std::to_string(lags) +
                                         ", n " + std::to_string(n) + ")");
    }
    if (dof == 0) throw Error(Errc::invalid_argument, "Ljung-Box degrees of freedom must be >= 1");
    LjungBoxResult out;
    out.lags = lags;
    out.dof = dof;
    const auto nd = static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        const double r = autocorrelation(x, k);
        sum += r * r / (nd - static_cast<double>(k));
    }
    out.statistic = nd * (nd + 2.0) * sum;
    out.p_value = chi_square_upper_tail(out.statistic, static_cast<double>(dof));
    return out;
}

}  // namespace raingen
