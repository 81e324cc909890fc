#pragma once

/// Right-invariant H^1_alpha energy of paths of conformal maps, pulled back to
/// the reference disk:
///
///   L(phi, phidot) = 1/2 ( ||phi' phidot||^2 + alpha ||phidot'||^2 ),
///
/// together with its midpoint discretisation and the summed discrete action.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "confgeo/fft.hpp"
#include "confgeo/holo_poly.hpp"

namespace confgeo {

class MetricParams {
public:
    explicit MetricParams(double alpha = 0.0) : alpha_(alpha) {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("MetricParams: alpha must be finite and >= 0");
    }
    double alpha() const noexcept { return alpha_; }

private:
    double alpha_;
};

/// phi_0, ..., phi_N on the unit time interval with uniform step h = 1/N.
class DiscretePath {
public:
    DiscretePath() = default;
    explicit DiscretePath(std::vector<Polynomial> steps) : steps_(std::move(steps)) {
        if (steps_.size() < 2) throw std::invalid_argument("DiscretePath: need at least two steps (N >= 1)");
        const std::size_t n = steps_.front().size();
        if (n == 0) throw std::invalid_argument("DiscretePath: empty degree bound");
        for (const auto& s : steps_) {
            if (s.size() != n) throw std::invalid_argument("DiscretePath: all steps must share the degree bound");
        }
    }

    std::size_t intervals() const noexcept { return steps_.empty() ? 0 : steps_.size() - 1; }
    double h() const noexcept { return 1.0 / double(intervals()); }
    std::size_t degree_bound() const noexcept { return steps_.empty() ? 0 : steps_.front().size(); }

    const Polynomial& operator[](std::size_t k) const { return steps_[k]; }
    Polynomial& operator[](std::size_t k) { return steps_[k]; }
    const std::vector<Polynomial>& steps() const noexcept { return steps_; }

    DiscretePath reversed() const { return DiscretePath(std::vector<Polynomial>(steps_.rbegin(), steps_.rend())); }

private:
    std::vector<Polynomial> steps_;
};

enum class ActionMode { naive, fft };

inline double lagrangian(const Polynomial& phi, const Polynomial& phidot, const MetricParams& params) {
    const double transport = norm2_l2(mul_naive(derivative(phi), phidot));
    const double stretch = params.alpha() == 0.0 ? 0.0 : norm2_l2(derivative(phidot));
    return 0.5 * (transport + params.alpha() * stretch);
}

inline double discrete_lagrangian(const Polynomial& phi_k, const Polynomial& phi_k1, double h, const MetricParams& params) {
    if (!(h > 0.0)) throw std::invalid_argument("discrete_lagrangian: h must be positive");
    if (phi_k.size() != phi_k1.size()) throw std::invalid_argument("discrete_lagrangian: degree bounds differ");
    const Polynomial mid_deriv = derivative((phi_k + phi_k1) * 0.5);
    const Polynomial disp = phi_k1 - phi_k;
    const double transport = norm2_l2(mul_naive(mid_deriv, disp));
    const double stretch = params.alpha() == 0.0 ? 0.0 : norm2_l2(derivative(disp));
    return (transport + params.alpha() * stretch) / (2.0 * h);
}

namespace detail {

// Staged evaluation with one padded transform pair per interval:
// derivative-difference term first, then the FFT product term.
inline double discrete_action_fft(const DiscretePath& path, const MetricParams& params) {
    const std::size_t steps = path.intervals();
    const std::size_t n = path.degree_bound();
    const double h = path.h();

    std::vector<Polynomial> derivs;
    derivs.reserve(steps + 1);
    for (const auto& phi : path.steps()) derivs.push_back(derivative(phi));

    double stretch_sum = 0.0;
    if (params.alpha() != 0.0) {
        for (std::size_t k = 0; k < steps; ++k) stretch_sum += norm2_l2(derivs[k + 1] - derivs[k]);
    }
    const double stretch_term = params.alpha() / (2.0 * h) * stretch_sum;

    // m' has at most n-1 nonzero coefficients and d has n, so the product
    // has 2n-2 and a transform of length >= 2n-2 never wraps.
    const std::size_t len = next_pow2(n >= 2 ? 2 * n - 2 : 1);
    std::vector<Complex> a(len), b(len);
    double transport_sum = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        std::fill(a.begin(), a.end(), Complex{});
        std::fill(b.begin(), b.end(), Complex{});
        for (std::size_t i = 0; i + 1 < n; ++i) a[i] = 0.5 * (derivs[k][i] + derivs[k + 1][i]);
        for (std::size_t i = 0; i < n; ++i) b[i] = (path[k + 1][i] - path[k][i]) / h;
        fft<double>(a);
        fft<double>(b);
        for (std::size_t j = 0; j < len; ++j) a[j] *= b[j];
        fft<double>(a, true);
        for (std::size_t i = 0; i < len; ++i) transport_sum += std::norm(a[i]) * monomial_norm2(i);
    }
    return stretch_term + 0.5 * h * transport_sum;
}

}  // namespace detail

inline double discrete_action(const DiscretePath& path, const MetricParams& params, ActionMode mode = ActionMode::naive) {
    if (path.intervals() == 0) throw std::invalid_argument("discrete_action: empty path");
    if (mode == ActionMode::fft) return detail::discrete_action_fft(path, params);
    double sum = 0.0;
    for (std::size_t k = 0; k < path.intervals(); ++k) sum += discrete_lagrangian(path[k], path[k + 1], path.h(), params);
    return sum;
}

/// Partial derivatives of the discrete action with respect to the interior
/// coefficients.  Entry [k-1][j] packs (d/dRe c_j + i d/dIm c_j) of phi_k, for
/// k = 1..N-1; the action is real but not holomorphic in the coefficients, so
/// the two real partials are carried separately in one complex number.
inline std::vector<Polynomial> action_gradient(const DiscretePath& path, const MetricParams& params) {
    const std::size_t steps = path.intervals();
    if (steps < 2) throw std::invalid_argument("action_gradient: need N >= 2");
    const std::size_t n = path.degree_bound();
    const double inv_h = 1.0 / path.h();
    const double alpha = params.alpha();

    // full[k] accumulates the gradient for every step, endpoints included;
    // only the interior entries are returned.
    std::vector<Polynomial> full(steps + 1, Polynomial(n));

    for (std::size_t k = 0; k < steps; ++k) {
        const Polynomial mid_deriv = derivative((path[k] + path[k + 1]) * 0.5);
        const Polynomial disp = path[k + 1] - path[k];
        const Polynomial disp_deriv = derivative(disp);
        Polynomial weighted = mul_naive(mid_deriv, disp);
        for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] *= monomial_norm2(i);

        // corr_x[j] = sum_l weighted[l + j] conj(x[l])
        auto corr = [&](const Polynomial& x, std::size_t j) {
            Complex acc{};
            for (std::size_t l = 0; l < x.size() && l + j < weighted.size(); ++l) acc += weighted[l + j] * std::conj(x[l]);
            return acc;
        };

        for (std::size_t j = 0; j < n; ++j) {
            const Complex via_mid = j == 0 ? Complex{} : 0.5 * double(j) * corr(disp, j - 1);
            Complex via_disp = corr(mid_deriv, j);
            if (alpha != 0.0 && j > 0) via_disp += alpha * double(j) * monomial_norm2(j - 1) * disp_deriv[j - 1];
            full[k + 1][j] += inv_h * (via_mid + via_disp);
            full[k][j] += inv_h * (via_mid - via_disp);
        }
    }
    return std::vector<Polynomial>(full.begin() + 1, full.end() - 1);
}

/// Exact restriction of the action to a line: A(x + t p) - A(x) equals
/// sum_{i=1..4} coeff[i-1] t^i, since every L_d is quartic in the coefficients.
struct QuarticLine {
    std::array<double, 4> coeff{};

    double delta(double t) const noexcept { return t * (coeff[0] + t * (coeff[1] + t * (coeff[2] + t * coeff[3]))); }
    double slope(double t) const noexcept {
        return coeff[0] + t * (2.0 * coeff[1] + t * (3.0 * coeff[2] + t * 4.0 * coeff[3]));
    }
};

/// `direction` holds one polynomial per interior step (endpoints are fixed).
inline QuarticLine action_along_line(const DiscretePath& path, std::span<const Polynomial> direction, const MetricParams& params) {
    const std::size_t steps = path.intervals();
    const std::size_t n = path.degree_bound();
    if (direction.size() + 1 != steps) throw std::invalid_argument("action_along_line: direction must cover interior steps");

    const Polynomial zero(n);
    auto dir = [&](std::size_t k) -> const Polynomial& { return (k == 0 || k == steps) ? zero : direction[k - 1]; };

    const double alpha = params.alpha();
    QuarticLine line;
    for (std::size_t k = 0; k < steps; ++k) {
        const Polynomial m0 = derivative((path[k] + path[k + 1]) * 0.5);
        const Polynomial d0 = path[k + 1] - path[k];
        const Polynomial mp = derivative((dir(k) + dir(k + 1)) * 0.5);
        const Polynomial dp = dir(k + 1) - dir(k);

        const Polynomial p0 = mul_naive(m0, d0);
        const Polynomial p1 = mul_naive(m0, dp) + mul_naive(mp, d0);
        const Polynomial p2 = mul_naive(mp, dp);

        const double scale = 1.0 / (2.0 * path.h());
        double c1 = 2.0 * inner_l2(p0, p1).real();
        double c2 = norm2_l2(p1) + 2.0 * inner_l2(p0, p2).real();
        if (alpha != 0.0) {
            const Polynomial d0d = derivative(d0);
            const Polynomial dpd = derivative(dp);
            c1 += alpha * 2.0 * inner_l2(d0d, dpd).real();
            c2 += alpha * norm2_l2(dpd);
        }
        line.coeff[0] += scale * c1;
        line.coeff[1] += scale * c2;
        line.coeff[2] += scale * 2.0 * inner_l2(p1, p2).real();
        line.coeff[3] += scale * norm2_l2(p2);
    }
    return line;
}

}  // namespace confgeo
