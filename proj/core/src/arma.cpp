#include "raingen/arma.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "raingen/error.hpp"

namespace raingen {
namespace {

// Reflection coefficients this close to 1 count as a unit root.
constexpr double kRootMargin = 1e-9;

struct CssState {
    std::vector<double> residuals;
    Eigen::MatrixXd jacobian;  // d e_t / d beta_k
    double sse = 0.0;
};

/// Residual recursion (and optionally its Jacobian) for beta = (ar..., ma...).
void css_evaluate(std::span<const double> w, std::size_t p, std::size_t q, const Eigen::VectorXd& beta,
                  CssState& state, bool with_jacobian) {
    const auto n = w.size();
    const auto k = p + q;
    state.residuals.assign(n, 0.0);
    if (with_jacobian) state.jacobian.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    auto& e = state.residuals;
    auto& jac = state.jacobian;
    double sse = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double value = w[t];
        for (std::size_t i = 0; i < p && i < t; ++i) value -= beta[static_cast<Eigen::Index>(i)] * w[t - 1 - i];
        for (std::size_t j = 0; j < q && j < t; ++j) {
            value -= beta[static_cast<Eigen::Index>(p + j)] * e[t - 1 - j];
        }
        e[t] = value;
        sse += value * value;
        if (!with_jacobian) continue;
        const auto row = static_cast<Eigen::Index>(t);
        for (std::size_t i = 0; i < p; ++i) {
            jac(row, static_cast<Eigen::Index>(i)) = i < t ? -w[t - 1 - i] : 0.0;
        }
        for (std::size_t j = 0; j < q; ++j) {
            jac(row, static_cast<Eigen::Index>(p + j)) = j < t ? -e[t - 1 - j] : 0.0;
        }
        for (std::size_t l = 0; l < q && l < t; ++l) {
            const double theta = beta[static_cast<Eigen::Index>(p + l)];
            jac.row(row) -= theta * jac.row(static_cast<Eigen::Index>(t - 1 - l));
        }
    }
    state.sse = sse;
}

bool admissible(const Eigen::VectorXd& beta, std::size_t p, std::size_t q, double radius) {
    std::vector<double> ar(beta.data(), beta.data() + p);
    std::vector<double> neg_ma(q);
    for (std::size_t j = 0; j < q; ++j) neg_ma[j] = -beta[static_cast<Eigen::Index>(p + j)];
    return roots_outside_radius(ar, radius) && roots_outside_radius(neg_ma, radius);
}

struct LmOutcome {
    Eigen::VectorXd beta;
    double sse = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    bool converged = false;
};

LmOutcome levenberg_marquardt(std::span<const double> w, std::size_t p, std::size_t q, Eigen::VectorXd beta,
                              const FitOptions& options) {
    const auto k = static_cast<Eigen::Index>(p + q);
    LmOutcome out;
    CssState state;
    css_evaluate(w, p, q, beta, state, true);
    if (!std::isfinite(state.sse)) return out;
    double sse = state.sse;
    double lambda = 1e-3;
    CssState trial;

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        out.iterations = iter + 1;
        if (k == 0 || sse == 0.0) {
            out.converged = true;
            break;
        }
        const Eigen::MatrixXd normal = state.jacobian.transpose() * state.jacobian;
        const Eigen::VectorXd gradient = state.jacobian.transpose() * Eigen::Map<const Eigen::VectorXd>(
                                                                         state.residuals.data(), state.residuals.size());
        if (gradient.lpNorm<Eigen::Infinity>() <= options.tolerance * (1.0 + sse)) {
            out.converged = true;
            break;
        }
        const double diag_floor = 1e-12 * (1.0 + normal.diagonal().maxCoeff());
        bool accepted = false;
        bool small_step = false;
        double improvement = 0.0;
        while (lambda < 1e16) {
            Eigen::MatrixXd damped = normal;
            for (Eigen::Index d = 0; d < k; ++d) damped(d, d) += lambda * std::max(normal(d, d), diag_floor);
            const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
            const Eigen::VectorXd candidate = beta + step;
            if (!step.allFinite() || !admissible(candidate, p, q, options.min_root_modulus)) {
                lambda *= 10.0;
                continue;
            }
            css_evaluate(w, p, q, candidate, trial, true);
            if (std::isfinite(trial.sse) && trial.sse < sse) {
                improvement = sse - trial.sse;
                small_step = step.norm() <= 1e-10 * (1.0 + beta.norm());
                beta = candidate;
                sse = trial.sse;
                std::swap(state, trial);
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No admissible downhill step at any damping: a stationary point
            // (possibly on the admissible boundary).
            out.converged = true;
            break;
        }
        if (improvement <= options.tolerance * sse || small_step) {
            out.converged = true;
            break;
        }
    }
    out.beta = beta;
    out.sse = sse;
    return out;
}

std::vector<double> demeaned(std::span<const double> series, double mean) {
    std::vector<double> w(series.begin(), series.end());
    for (auto& v : w) v -= mean;
    return w;
}

}  // namespace

bool roots_outside_unit_circle(std::span<const double> a) {
    // Step-down recursion: a^(k-1)_i = (a_i + r a_{k-i}) / (1 - r^2), r = a_k.
    std::vector<double> coeffs(a.begin(), a.end());
    while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
    for (auto order = coeffs.size(); order > 0; --order) {
        const double r = coeffs[order - 1];
        if (!std::isfinite(r) || std::abs(r) >= 1.0 - kRootMargin) return false;
        const double scale = 1.0 - r * r;
        std::vector<double> next(order - 1);
        for (std::size_t i = 0; i + 1 < order; ++i) next[i] = (coeffs[i] + r * coeffs[order - 2 - i]) / scale;
        coeffs = std::move(next);
    }
    return true;
}

bool roots_outside_radius(std::span<const double> a, double radius) {
    std::vector<double> scaled(a.begin(), a.end());
    double factor = 1.0;
    for (auto& c : scaled) {
        factor *= radius;
        c *= factor;
    }
    return roots_outside_unit_circle(scaled);
}

bool is_stationary(const ArmaModel& model) { return roots_outside_unit_circle(model.ar_coeffs); }

bool is_invertible(const ArmaModel& model) {
    std::vector<double> neg(model.ma_coeffs.size());
    std::transform(model.ma_coeffs.begin(), model.ma_coeffs.end(), neg.begin(), [](double v) { return -v; });
    return roots_outside_unit_circle(neg);
}

ArmaModel fit_arma(std::span<const double> series, std::size_t p, std::size_t q, const FitOptions& options) {
    const auto n = series.size();
    if (n < min_fit_length(p, q)) {
        throw Error(Errc::too_short, "ARMA(" + std::to_string(p) + "," + std::to_string(q) + ") needs at least " +
                                         std::to_string(min_fit_length(p, q)) + " values, got " +
                                         std::to_string(n));
    }
    for (double v : series) {
        if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "series contains non-finite values");
    }

    ArmaModel model;
    model.p = p;
    model.q = q;
    model.n_fit = n;
    model.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    const auto w = demeaned(series, model.mean);
    const auto k = static_cast<Eigen::Index>(p + q);

    LmOutcome best = levenberg_marquardt(w, p, q, Eigen::VectorXd::Zero(k), options);
    if (!best.converged || !std::isfinite(best.sse)) {
        // Deterministic jitter so repeated fits of the same data agree.
        Rng rng(0x5eedULL + 131 * p + q);
        std::uniform_real_distribution<double> jitter(-options.restart_jitter, options.restart_jitter);
        for (std::size_t r = 0; r < options.restarts; ++r) {
            Eigen::VectorXd start(k);
            do {
                for (Eigen::Index d = 0; d < k; ++d) start[d] = jitter(rng);
            } while (!admissible(start, p, q, options.min_root_modulus));
            LmOutcome trial = levenberg_marquardt(w, p, q, start, options);
            ++model.restarts;
            const bool better = (trial.converged && !best.converged) ||
                                (trial.converged == best.converged && trial.sse < best.sse);
            if (std::isfinite(trial.sse) && better) best = std::move(trial);
        }
    }
    if (!std::isfinite(best.sse) || best.beta.size() != k) {
        throw Error(Errc::fit_failed, "no stationary-invertible ARMA(" + std::to_string(p) + "," +
                                          std::to_string(q) + ") fit found");
    }

    model.ar_coeffs.assign(best.beta.data(), best.beta.data() + p);
    model.ma_coeffs.assign(best.beta.data() + p, best.beta.data() + p + q);
    model.sse = best.sse;
    model.noise_variance = best.sse / static_cast<double>(n - p - q);
    model.iterations = best.iterations;
    model.converged = best.converged;
    return model;
}

std::vector<double> arma_residuals(const ArmaModel& model, std::span<const double> series) {
    if (model.ar_coeffs.size() != model.p || model.ma_coeffs.size() != model.q) {
        throw Error(Errc::invalid_argument, "model coefficient counts do not match its orders");
    }
    Eigen::VectorXd beta(static_cast<Eigen::Index>(model.p + model.q));
    for (std::size_t i = 0; i < model.p; ++i) beta[static_cast<Eigen::Index>(i)] = model.ar_coeffs[i];
    for (std::size_t j = 0; j < model.q; ++j) beta[static_cast<Eigen::Index>(model.p + j)] = model.ma_coeffs[j];
    CssState state;
    css_evaluate(demeaned(series, model.mean), model.p, model.q, beta, state, false);
    return std::move(state.residuals);
}

bool is_degenerate(const ArmaModel& model) noexcept { return !(model.noise_variance > 0.0); }

double aic_score(const ArmaModel& model) {
    const auto params = static_cast<double>(model.p + model.q + 1);
    if (is_degenerate(model)) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(model.n_fit) * std::log(model.noise_variance) + 2.0 * params;
}

double fpe_score(const ArmaModel& model) {
    const auto n = static_cast<double>(model.n_fit);
    const auto k = static_cast<double>(model.p + model.q);
    if (n - k - 1.0 <= 0.0) throw Error(Errc::too_short, "FPE undefined for n <= p + q + 1");
    return model.noise_variance * (n + k + 1.0) / (n - k - 1.0);
}

WhitenessResult residual_whiteness(const ArmaModel& model, std::span<const double> series,
                                   std::optional<std::size_t> lags, double alpha) {
    const auto n = series.size();
    const std::size_t h = lags.value_or(std::min<std::size_t>(10, n / 5));
    if (h == 0 || n <= model.p + model.q + h) {
        throw Error(Errc::too_short, "whiteness test needs n - p - q > lags (n " + std::to_string(n) + ", lags " +
                                         std::to_string(h) + ")");
    }
    const auto residuals = arma_residuals(model, series);
    const std::size_t dof = h > model.p + model.q ? h - model.p - model.q : 1;
    WhitenessResult out;
    out.alpha = alpha;
    out.test = ljung_box_test(residuals, h, dof);
    out.pass = out.test.p_value > alpha;
    return out;
}

OrderSelection select_order(std::span<const double> series, const SelectOptions& options) {
    const std::size_t cols = options.max_q + 1;
    const std::size_t cells = (options.max_p + 1) * cols;
    std::vector<OrderScore> scores(cells);
    std::vector<std::optional<ArmaModel>> models(cells);

    detail::parallel_for(cells, options.threads, [&](std::size_t cell) {
        OrderScore& score = scores[cell];
        score.p = cell / cols;
        score.q = cell % cols;
        try {
            ArmaModel m = fit_arma(series, score.p, score.q, options.fit);
            std::vector<double> neg_ma(m.ma_coeffs.size());
            for (std::size_t j = 0; j < neg_ma.size(); ++j) neg_ma[j] = -m.ma_coeffs[j];
            if (!roots_outside_radius(m.ar_coeffs, options.min_root_modulus) ||
                !roots_outside_radius(neg_ma, options.min_root_modulus)) {
                score.failure = "root near the unit circle";
                return;
            }
            score.aic = aic_score(m);
            score.fpe = fpe_score(m);
            score.noise_variance = m.noise_variance;
            score.ok = true;
            models[cell] = std::move(m);
        } catch (const Error& e) {
            score.failure = e.what();
        }
    });

    std::optional<std::size_t> best;
    auto better = [&](std::size_t a, std::size_t b) {
        const auto& x = scores[a];
        const auto& y = scores[b];
        if (x.aic != y.aic) return x.aic < y.aic;
        if (x.fpe != y.fpe) return x.fpe < y.fpe;
        if (x.p + x.q != y.p + y.q) return x.p + x.q < y.p + y.q;
        return x.p < y.p;
    };
    for (std::size_t cell = 0; cell < cells; ++cell) {
        if (!scores[cell].ok) continue;
        if (!best || better(cell, *best)) best = cell;
    }
    if (!best) throw Error(Errc::fit_failed, "every ARMA order on the grid failed to fit");

    OrderSelection out;
    out.p = scores[*best].p;
    out.q = scores[*best].q;
    out.model = std::move(*models[*best]);
    out.scores = std::move(scores);
    try {
        out.whiteness = residual_whiteness(out.model, series);
        out.adequate = out.whiteness.pass;
    } catch (const Error&) {
        out.adequate = false;
    }
    return out;
}

std::vector<double> simulate(const ArmaModel& model, std::size_t length, Rng& rng) {
    if (model.ar_coeffs.size() != model.p || model.ma_coeffs.size() != model.q) {
        throw Error(Errc::invalid_argument, "model coefficient counts do not match its orders");
    }
    if (!(model.noise_variance >= 0.0)) throw Error(Errc::invalid_argument, "noise variance must be >= 0");
    const std::size_t burn_in = 10 * (model.p + model.q + 1);
    const std::size_t total = burn_in + length;
    const double sd = std::sqrt(model.noise_variance);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> w(total, 0.0);
    std::vector<double> e(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        e[t] = sd * normal(rng);
        double value = e[t];
        for (std::size_t i = 0; i < model.p && i < t; ++i) value += model.ar_coeffs[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < model.q && j < t; ++j) value += model.ma_coeffs[j] * e[t - 1 - j];
        w[t] = value;
    }
    std::vector<double> out(length);
    for (std::size_t t = 0; t < length; ++t) out[t] = model.mean + w[burn_in + t];
    return out;
}

}  // namespace raingen
