#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace raingen::oracle {
namespace {

class BoxMuller {
public:
    explicit BoxMuller(std::uint64_t seed) : engine_(seed) {}
    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform(engine_);
        } while (u1 <= 0.0);
        const double u2 = uniform(engine_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937 engine_;
    std::uniform_real_distribution<double> uniform{0.0, 1.0};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

std::vector<double> yule_walker(std::span<const double> x, std::size_t p) {
    const auto n = x.size();
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    std::vector<double> gamma(p + 1, 0.0);
    for (std::size_t k = 0; k <= p; ++k) {
        for (std::size_t t = k; t < n; ++t) gamma[k] += (x[t] - mean) * (x[t - k] - mean);
        gamma[k] /= static_cast<double>(n);
    }
    Eigen::MatrixXd toeplitz(p, p);
    Eigen::VectorXd rhs(p);
    for (std::size_t i = 0; i < p; ++i) {
        rhs[static_cast<Eigen::Index>(i)] = gamma[i + 1];
        for (std::size_t j = 0; j < p; ++j) {
            toeplitz(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gamma[i > j ? i - j : j - i];
        }
    }
    const Eigen::VectorXd phi = toeplitz.colPivHouseholderQr().solve(rhs);
    return {phi.data(), phi.data() + p};
}

double companion_spectral_radius(std::span<const double> a) {
    const auto k = static_cast<Eigen::Index>(a.size());
    if (k == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) companion(0, i) = a[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double chi_square_tail_quadrature(double x, double dof) {
    if (x <= 0.0) return 1.0;
    // Substitute t = u^2 so the integrand is regular at 0 for dof >= 1.
    const double norm = std::pow(2.0, dof / 2.0) * std::tgamma(dof / 2.0);
    auto integrand = [&](double u) { return 2.0 * std::pow(u, dof - 1.0) * std::exp(-u * u / 2.0) / norm; };
    const double upper = std::sqrt(x);
    const int intervals = 20000;
    const double h = upper / intervals;
    double sum = integrand(0.0) + integrand(upper);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
    return 1.0 - sum * h / 3.0;
}

std::vector<double> ar1_series(double phi, double mean, double sd, std::size_t n, std::uint64_t seed) {
    BoxMuller normal(seed);
    std::vector<double> out(n);
    double w = normal() * sd / std::sqrt(1.0 - phi * phi);
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) w = phi * w + sd * normal();
        out[t] = mean + w;
    }
    return out;
}

std::vector<double> gaussian_series(double mean, double sd, std::size_t n, std::uint64_t seed) {
    BoxMuller normal(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = mean + sd * normal();
    return out;
}

MonthlySeries monthly_from_totals(std::span<const double> totals, std::span<const double> profile, int start_year,
                                  const char* station) {
    const double weight = std::accumulate(profile.begin(), profile.end(), 0.0);
    MonthlySeries s;
    s.station_id = station;
    s.start_year = start_year;
    s.start_month = 1;
    for (double total : totals) {
        for (std::size_t m = 0; m < 12; ++m) s.values.push_back(total * profile[m] / weight);
    }
    return s;
}

double sorted_nearest_rank(std::vector<double> values, double pct) {
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    std::size_t rank = 1;
    while (static_cast<double>(rank) < pct / 100.0 * n) ++rank;
    return values[rank - 1];
}

}  // namespace raingen::oracle
