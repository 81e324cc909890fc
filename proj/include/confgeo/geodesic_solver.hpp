#pragma once

/// Two-point geodesic boundary-value problem from the identity map to a
/// target polynomial, solved by minimising the discrete action over the
/// interior steps with the endpoints clamped.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "confgeo/holo_poly.hpp"
#include "confgeo/metric.hpp"
#include "confgeo/optimize.hpp"

namespace confgeo {

/// Polar sample grid for conformality certification: `angular` equally spaced
/// angles times radii j/radial for j = 1..radial (so r = 1 is always included).
struct SampleGrid {
    std::size_t angular = 64;
    std::size_t radial = 8;
};

struct SolverConfig {
    std::size_t n = 16;  ///< degree bound
    std::size_t N = 20;  ///< time steps
    double alpha = 0.0;
    double grad_tol = 1e-8;
    std::size_t max_iters = 5000;
    SampleGrid conformality_samples{};
    double conformal_threshold = 1e-3;
    ActionMode mode = ActionMode::naive;
    std::size_t lbfgs_memory = 20;

    void validate() const {
        if (n < 2) throw std::invalid_argument("SolverConfig: n must be >= 2");
        if (N < 2) throw std::invalid_argument("SolverConfig: N must be >= 2");
        if (!(grad_tol > 0.0)) throw std::invalid_argument("SolverConfig: grad_tol must be positive");
        if (max_iters == 0) throw std::invalid_argument("SolverConfig: max_iters must be positive");
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("SolverConfig: alpha must be finite and >= 0");
        if (conformality_samples.angular == 0 || conformality_samples.radial == 0) {
            throw std::invalid_argument("SolverConfig: conformality sample counts must be positive");
        }
    }
};

struct GeodesicResult {
    DiscretePath path;
    double action = 0.0;
    double grad_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// min |phi_k'| over the sample grid, one entry per step k = 0..N.
    std::vector<double> conformal_certificate;
    /// Action at the initial guess and after every accepted iteration.
    std::vector<double> action_history;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, GeodesicResult result)
        : std::runtime_error(what), result_(std::move(result)) {}
    const GeodesicResult& result() const noexcept { return result_; }

private:
    GeodesicResult result_;
};

/// Some step has min |phi'| at or below the threshold: the path left Q_n.
class NotConformal : public SolverError {
public:
    using SolverError::SolverError;
};

/// max_iters reached, or the line search stalled, with grad_norm > grad_tol.
class NoConvergence : public SolverError {
public:
    using SolverError::SolverError;
};

/// Truncation of the Taylor series to n coefficients (zero-padded if shorter).
inline Polynomial project_to_qn(const Polynomial& target, std::size_t n) { return target.resized(n); }

/// Linear interpolation in coefficient space from the identity to `target`.
inline DiscretePath initial_guess(const Polynomial& target, std::size_t N) {
    if (N < 1) throw std::invalid_argument("initial_guess: N must be >= 1");
    if (target.size() < 2) throw std::invalid_argument("initial_guess: degree bound must be >= 2");
    const Polynomial start = Polynomial::identity(target.size());
    std::vector<Polynomial> steps;
    steps.reserve(N + 1);
    steps.push_back(start);
    for (std::size_t k = 1; k < N; ++k) {
        const double t = double(k) / double(N);
        steps.push_back(start * (1.0 - t) + target * t);
    }
    steps.push_back(target);
    return DiscretePath(std::move(steps));
}

inline double min_derivative_modulus(const Polynomial& phi, const SampleGrid& grid) {
    const Polynomial deriv = derivative(phi);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= grid.radial; ++j) {
        const double r = double(j) / double(grid.radial);
        for (std::size_t m = 0; m < grid.angular; ++m) {
            const double theta = 2.0 * std::numbers::pi * double(m) / double(grid.angular);
            best = std::min(best, std::abs(deriv(std::polar(r, theta))));
        }
    }
    return best;
}

/// Per-step minimum of |phi_k'| on the polar grid.  A sampled certificate,
/// not a proof that phi_k' has no zero in the disk.
inline std::vector<double> certify_conformal(const DiscretePath& path, const SampleGrid& grid = {}) {
    std::vector<double> minima;
    minima.reserve(path.steps().size());
    for (const auto& phi : path.steps()) minima.push_back(min_derivative_modulus(phi, grid));
    return minima;
}

namespace detail {

// Interior coefficients flattened as (re, im) pairs, step-major.
class ActionProblem {
public:
    ActionProblem(DiscretePath initial, MetricParams params, ActionMode mode)
        : path_(std::move(initial)), params_(params), mode_(mode), n_(path_.degree_bound()),
          interior_(path_.intervals() - 1) {
        // Hessian diagonal of the action at the identity path, per coefficient
        // index: ||z^j||^2 + alpha j^2 ||z^{j-1}||^2, up to a common factor.
        inv_diag_.resize(dimension());
        for (std::size_t k = 0; k < interior_; ++k) {
            for (std::size_t j = 0; j < n_; ++j) {
                const double diag = monomial_norm2(j) + (j > 0 ? params_.alpha() * double(j * j) * monomial_norm2(j - 1) : 0.0);
                inv_diag_[2 * (k * n_ + j)] = inv_diag_[2 * (k * n_ + j) + 1] = 1.0 / diag;
            }
        }
    }

    std::size_t dimension() const noexcept { return 2 * n_ * interior_; }

    std::vector<double> pack() const {
        std::vector<double> x(dimension());
        for (std::size_t k = 0; k < interior_; ++k) {
            for (std::size_t j = 0; j < n_; ++j) {
                x[2 * (k * n_ + j)] = path_[k + 1][j].real();
                x[2 * (k * n_ + j) + 1] = path_[k + 1][j].imag();
            }
        }
        return x;
    }

    const DiscretePath& unpack(std::span<const double> x) {
        for (std::size_t k = 0; k < interior_; ++k) {
            for (std::size_t j = 0; j < n_; ++j) path_[k + 1][j] = {x[2 * (k * n_ + j)], x[2 * (k * n_ + j) + 1]};
        }
        return path_;
    }

    double value_and_gradient(std::span<const double> x, std::span<double> g) {
        const DiscretePath& path = unpack(x);
        const auto grad = action_gradient(path, params_);
        for (std::size_t k = 0; k < interior_; ++k) {
            for (std::size_t j = 0; j < n_; ++j) {
                g[2 * (k * n_ + j)] = grad[k][j].real();
                g[2 * (k * n_ + j) + 1] = grad[k][j].imag();
            }
        }
        return discrete_action(path, params_, mode_);
    }

    std::optional<LineStep> line_minimize(std::span<const double> x, std::span<const double> d) {
        const DiscretePath& path = unpack(x);
        std::vector<Polynomial> dir(interior_, Polynomial(n_));
        for (std::size_t k = 0; k < interior_; ++k) {
            for (std::size_t j = 0; j < n_; ++j) dir[k][j] = {d[2 * (k * n_ + j)], d[2 * (k * n_ + j) + 1]};
        }
        const QuarticLine line = action_along_line(path, dir, params_);
        const auto t = first_local_minimizer(line.coeff);
        if (!t) return std::nullopt;
        return LineStep{*t, line.delta(*t)};
    }

    std::span<const double> inverse_diagonal() const noexcept { return inv_diag_; }

private:
    DiscretePath path_;
    MetricParams params_;
    ActionMode mode_;
    std::size_t n_;
    std::size_t interior_;
    std::vector<double> inv_diag_;
};

}  // namespace detail

/// Geodesic from the identity to `target` (projected to the configured n).
/// Throws NotConformal or NoConvergence carrying the final result.
inline GeodesicResult solve(const SolverConfig& config, const Polynomial& target) {
    config.validate();
    const MetricParams params(config.alpha);

    detail::ActionProblem problem(initial_guess(project_to_qn(target, config.n), config.N), params, config.mode);
    std::vector<double> x = problem.pack();
    const LbfgsReport report =
        minimize_lbfgs(problem, x, LbfgsOptions{config.lbfgs_memory, config.grad_tol, config.max_iters});

    GeodesicResult result;
    result.path = problem.unpack(x);
    result.action = report.value;
    result.grad_norm = report.grad_norm;
    result.iterations = report.iterations;
    result.converged = report.converged();
    result.action_history = report.history;
    result.conformal_certificate = certify_conformal(result.path, config.conformality_samples);

    const auto worst = std::min_element(result.conformal_certificate.begin(), result.conformal_certificate.end());
    if (!(*worst > config.conformal_threshold)) {
        const auto k = std::distance(result.conformal_certificate.begin(), worst);
        throw NotConformal("step " + std::to_string(k) + " has min |phi'| = " + std::to_string(*worst) +
                               " <= " + std::to_string(config.conformal_threshold),
                           std::move(result));
    }
    if (!result.converged) {
        const std::string why = report.reason == StopReason::stalled ? "line search stalled" : "max_iters reached";
        throw NoConvergence(why + " with grad_norm " + std::to_string(result.grad_norm), std::move(result));
    }
    return result;
}

}  // namespace confgeo
