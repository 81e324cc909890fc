#pragma once

// Independent reference computations used only by the test suites.  Nothing
// here calls into the library's inner products or gradients.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "confgeo/holo_poly.hpp"
#include "confgeo/metric.hpp"

namespace confgeo::oracle {

/// Gauss-Legendre nodes and weights on [0, 1] (Newton on P_m).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(std::size_t m) {
    std::vector<double> x(m), w(m);
    for (std::size_t i = 0; i < m; ++i) {
        double t = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(m) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (std::size_t k = 2; k <= m; ++k) {
                const double pk = ((2.0 * double(k) - 1.0) * t * p1 - (double(k) - 1.0) * p0) / double(k);
                p0 = p1;
                p1 = pk;
            }
            dp = double(m) * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        x[i] = 0.5 * (1.0 - t);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    return {x, w};
}

/// Integral over the unit disk of f(z) dA on a polar tensor grid: Gauss in r
/// (with the Jacobian r) times the trapezoid rule in theta.
inline std::complex<double> disk_quadrature(const std::function<std::complex<double>(std::complex<double>)>& f,
                                            std::size_t radial, std::size_t angular) {
    const auto [r, wr] = gauss_legendre01(radial);
    std::complex<double> acc{};
    for (std::size_t i = 0; i < radial; ++i) {
        std::complex<double> ring{};
        for (std::size_t m = 0; m < angular; ++m) {
            ring += f(std::polar(r[i], 2.0 * std::numbers::pi * double(m) / double(angular)));
        }
        acc += wr[i] * r[i] * ring * (2.0 * std::numbers::pi / double(angular));
    }
    return acc;
}

/// Doubles the grid until two successive estimates agree to `tol`.
inline std::complex<double> disk_quadrature_refined(const std::function<std::complex<double>(std::complex<double>)>& f,
                                                    double tol = 1e-10) {
    std::size_t radial = 4, angular = 8;
    auto prev = disk_quadrature(f, radial, angular);
    for (int level = 0; level < 8; ++level) {
        radial *= 2;
        angular *= 2;
        const auto cur = disk_quadrature(f, radial, angular);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    return prev;
}

/// <p, q>_{L^2(D)} by quadrature of p(z) conj(q(z)).
inline std::complex<double> quadrature_inner(const Polynomial& p, const Polynomial& q) {
    return disk_quadrature_refined([&](std::complex<double> z) { return p(z) * std::conj(q(z)); });
}

inline Polynomial random_polynomial(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Polynomial p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = {u(rng), u(rng)};
    return p;
}

inline DiscretePath random_path(std::mt19937_64& rng, std::size_t n, std::size_t N) {
    std::vector<Polynomial> steps;
    for (std::size_t k = 0; k <= N; ++k) steps.push_back(random_polynomial(rng, n));
    return DiscretePath(std::move(steps));
}

/// Central difference of the action along the real (imag = false) or
/// imaginary part of coefficient j of interior step k.
inline double action_central_difference(const DiscretePath& path, const MetricParams& params, std::size_t k, std::size_t j,
                                        bool imag, double step) {
    DiscretePath plus = path, minus = path;
    const std::complex<double> delta = imag ? std::complex<double>(0.0, step) : std::complex<double>(step, 0.0);
    plus[k][j] += delta;
    minus[k][j] -= delta;
    return (discrete_action(plus, params) - discrete_action(minus, params)) / (2.0 * step);
}

/// Richardson extrapolation of central differences at steps s, s/2:
/// (4 D(s/2) - D(s)) / 3 removes the O(s^2) term.
inline double action_richardson(const DiscretePath& path, const MetricParams& params, std::size_t k, std::size_t j, bool imag,
                                double step) {
    const double coarse = action_central_difference(path, params, k, j, imag, step);
    const double fine = action_central_difference(path, params, k, j, imag, step / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

/// min |p'(z)| over `samples` equally spaced points of the unit circle.
inline double dense_boundary_min_derivative(const Polynomial& p, std::size_t samples) {
    const Polynomial dp = derivative(p);
    double best = INFINITY;
    for (std::size_t m = 0; m < samples; ++m) {
        best = std::min(best, std::abs(dp(std::polar(1.0, 2.0 * std::numbers::pi * double(m) / double(samples)))));
    }
    return best;
}

}  // namespace confgeo::oracle
