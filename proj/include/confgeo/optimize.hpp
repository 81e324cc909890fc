#pragma once

/// Limited-memory BFGS over real vectors.
///
/// The problem supplies its own line minimiser, so objectives with a cheap
/// exact restriction to a line (polynomials) can use an exact step instead of
/// an Armijo search that stalls once decreases fall below the round-off of the
/// objective value.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace confgeo {

struct LineStep {
    double step = 0.0;
    /// Exact change of the objective at `step`; must be < 0 to accept.
    double change = 0.0;
};

template <typename P>
concept LineMinimizable = requires(P& p, std::span<const double> x, std::span<double> g, std::span<const double> d) {
    { p.value_and_gradient(x, g) } -> std::convertible_to<double>;
    { p.line_minimize(x, d) } -> std::same_as<std::optional<LineStep>>;
    { p.inverse_diagonal() } -> std::convertible_to<std::span<const double>>;
};

struct LbfgsOptions {
    std::size_t memory = 20;
    double grad_tol = 1e-8;  // sup norm
    std::size_t max_iters = 5000;
};

enum class StopReason { converged, max_iters, stalled };

struct LbfgsReport {
    double value = 0.0;
    double grad_norm = 0.0;
    std::size_t iterations = 0;
    StopReason reason = StopReason::max_iters;
    /// Objective at the start and after every accepted step.
    std::vector<double> history;

    bool converged() const noexcept { return reason == StopReason::converged; }
};

inline double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// First local minimiser t > 0 of a quartic sum_{i=1..4} coeff[i-1] t^i with
/// negative initial slope.  The slope is a cubic; it is split at its own
/// critical points into monotone pieces and the first sign change is bisected.
inline std::optional<double> first_local_minimizer(const std::array<double, 4>& coeff) {
    const auto [c1, c2, c3, c4] = coeff;
    if (!(c1 < 0.0)) return std::nullopt;
    auto slope = [&](double t) { return c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * 4.0 * c4)); };

    // slope'(t) = 2 c2 + 6 c3 t + 12 c4 t^2
    std::vector<double> breaks;
    const double qa = 12.0 * c4, qb = 6.0 * c3, qc = 2.0 * c2;
    if (qa != 0.0) {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
            if (q != 0.0) breaks.push_back(qc / q);
            breaks.push_back(q / qa);
        }
    } else if (qb != 0.0) {
        breaks.push_back(-qc / qb);
    }
    std::erase_if(breaks, [](double t) { return !(t > 0.0) || !std::isfinite(t); });
    std::sort(breaks.begin(), breaks.end());

    constexpr double t_max = 1e12;
    double lo = 0.0;
    std::optional<double> hi;
    for (double b : breaks) {
        if (slope(b) >= 0.0) {
            hi = b;
            break;
        }
        lo = b;
    }
    if (!hi) {
        double t = std::max(1.0, 2.0 * lo);
        while (slope(t) < 0.0) {
            t *= 2.0;
            if (t > t_max) return std::nullopt;
        }
        hi = t;
    }
    double a = lo, b = *hi;
    for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * b; ++it) {
        const double m = 0.5 * (a + b);
        (slope(m) < 0.0 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

/// Minimise from `x` (updated in place).  Every accepted step strictly
/// decreases the objective according to the problem's exact line model.
template <LineMinimizable Problem>
LbfgsReport minimize_lbfgs(Problem& problem, std::vector<double>& x, const LbfgsOptions& opts = {}) {
    const std::size_t dim = x.size();
    std::vector<double> g(dim), g_new(dim), d(dim), x_new(dim);
    const std::span<const double> inv_diag = problem.inverse_diagonal();

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> pairs;
    double gamma = 1.0;

    auto dot = [](std::span<const double> a, std::span<const double> b) {
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    };

    // d = -H g via the two-loop recursion with H0 = gamma * diag.
    auto direction = [&] {
        std::vector<double> q(g);
        std::vector<double> alphas(pairs.size());
        for (std::size_t i = pairs.size(); i-- > 0;) {
            alphas[i] = pairs[i].rho * dot(pairs[i].s, q);
            for (std::size_t j = 0; j < dim; ++j) q[j] -= alphas[i] * pairs[i].y[j];
        }
        for (std::size_t j = 0; j < dim; ++j) q[j] *= gamma * inv_diag[j];
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const double beta = pairs[i].rho * dot(pairs[i].y, q);
            for (std::size_t j = 0; j < dim; ++j) q[j] += pairs[i].s[j] * (alphas[i] - beta);
        }
        for (std::size_t j = 0; j < dim; ++j) d[j] = -q[j];
    };

    LbfgsReport report;
    report.value = problem.value_and_gradient(x, g);
    report.grad_norm = sup_norm(g);
    report.history.push_back(report.value);
    if (report.grad_norm <= opts.grad_tol) {
        report.reason = StopReason::converged;
        return report;
    }

    while (report.iterations < opts.max_iters) {
        direction();
        if (!(dot(d, g) < 0.0)) {
            pairs.clear();
            gamma = 1.0;
            direction();
        }
        auto step = problem.line_minimize(x, d);
        if ((!step || !(step->change < 0.0)) && !pairs.empty()) {
            // Curvature memory gave a useless direction; retry preconditioned steepest descent.
            pairs.clear();
            gamma = 1.0;
            direction();
            step = problem.line_minimize(x, d);
        }
        if (!step || !(step->change < 0.0)) {
            report.reason = StopReason::stalled;
            return report;
        }

        for (std::size_t j = 0; j < dim; ++j) x_new[j] = x[j] + step->step * d[j];
        const double f_new = problem.value_and_gradient(x_new, g_new);

        Pair pair{std::vector<double>(dim), std::vector<double>(dim), 0.0};
        for (std::size_t j = 0; j < dim; ++j) {
            pair.s[j] = x_new[j] - x[j];
            pair.y[j] = g_new[j] - g[j];
        }
        const double sy = dot(pair.s, pair.y);
        if (sy > std::numeric_limits<double>::epsilon() * std::sqrt(dot(pair.s, pair.s) * dot(pair.y, pair.y))) {
            double y_hy = 0.0;
            for (std::size_t j = 0; j < dim; ++j) y_hy += pair.y[j] * pair.y[j] * inv_diag[j];
            gamma = sy / y_hy;
            pair.rho = 1.0 / sy;
            pairs.push_back(std::move(pair));
            if (pairs.size() > opts.memory) pairs.pop_front();
        }

        x.swap(x_new);
        g.swap(g_new);
        ++report.iterations;
        report.value = f_new;
        report.grad_norm = sup_norm(g);
        report.history.push_back(f_new);
        if (report.grad_norm <= opts.grad_tol) {
            report.reason = StopReason::converged;
            return report;
        }
    }
    report.reason = StopReason::max_iters;
    return report;
}

}  // namespace confgeo
