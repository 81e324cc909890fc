#pragma once

/// Reference solutions on the linear maps phi(z) = c z.
///
/// The reduced system in (c, a), with xi(z) = a z the Eulerian velocity, is
///
///   c' = a c,     a' (2c + alpha) = -4 a^2 c - alpha a^2,
///
/// for which d^2/dt^2 (c^2 + alpha c) = 0, so q(t) = c^2 + alpha c is affine
/// and c(t) follows by inverting the quadratic along a continuous branch.
///
/// `linear_geodesic_reference` integrates instead the geodesic equation of the
/// discrete-action metric restricted to linear maps,
/// (|c|^2/2 + alpha)|dc|^2, i.e. c'' = -conj(c) c'^2 / (|c|^2 + 2 alpha).
/// The two agree for alpha = 0 only.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "confgeo/holo_poly.hpp"

namespace confgeo {

struct TGState {
    Complex c;  ///< phi(z) = c z
    Complex a;  ///< xi(z) = a z

    friend TGState operator+(TGState x, TGState y) { return {x.c + y.c, x.a + y.a}; }
    friend TGState operator*(double s, TGState x) { return {s * x.c, s * x.a}; }
};

class SingularInertia : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BranchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline TGState tg_ode_rhs(const TGState& s, double alpha) {
    const Complex inertia = 2.0 * s.c + alpha;
    if (std::abs(inertia) < 1e-12) throw SingularInertia("tg_ode_rhs: |2c + alpha| below 1e-12");
    return {s.a * s.c, (-4.0 * s.a * s.a * s.c - alpha * s.a * s.a) / inertia};
}

/// (2c + alpha) a c = d/dt (c^2 + alpha c); constant along exact trajectories.
inline Complex tg_conserved(const TGState& s, double alpha) { return (2.0 * s.c + alpha) * s.a * s.c; }

/// Classical RK4 over [0, duration]; returns steps + 1 states.
inline std::vector<TGState> tg_ode_integrate(const TGState& initial, double alpha, double duration, std::size_t steps) {
    if (steps == 0) throw std::invalid_argument("tg_ode_integrate: steps must be positive");
    const double dt = duration / double(steps);
    std::vector<TGState> traj;
    traj.reserve(steps + 1);
    traj.push_back(initial);
    TGState s = initial;
    for (std::size_t i = 0; i < steps; ++i) {
        const TGState k1 = tg_ode_rhs(s, alpha);
        const TGState k2 = tg_ode_rhs(s + (0.5 * dt) * k1, alpha);
        const TGState k3 = tg_ode_rhs(s + (0.5 * dt) * k2, alpha);
        const TGState k4 = tg_ode_rhs(s + dt * k3, alpha);
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.push_back(s);
    }
    return traj;
}

namespace detail {

inline constexpr std::size_t branch_grid = 1024;

inline Complex closer_root(Complex q, double alpha, Complex previous) {
    const Complex s = std::sqrt(alpha * alpha + 4.0 * q);
    const Complex r1 = 0.5 * (-alpha + s);
    const Complex r2 = 0.5 * (-alpha - s);
    return std::abs(r1 - previous) <= std::abs(r2 - previous) ? r1 : r2;
}

}  // namespace detail

/// Continuous-branch inversion of c^2 + alpha c = (1-t) q0 + t q1 with c(0) = c0.
class TGClosedForm {
public:
    TGClosedForm(Complex c0, Complex c1, double alpha) : alpha_(alpha), q0_(c0 * c0 + alpha * c0), q1_(c1 * c1 + alpha * c1) {
        if (!(alpha >= 0.0)) throw std::invalid_argument("TGClosedForm: alpha must be >= 0");
        grid_.resize(detail::branch_grid + 1);
        grid_[0] = c0;
        for (std::size_t i = 1; i <= detail::branch_grid; ++i) {
            grid_[i] = detail::closer_root(q(double(i) / double(detail::branch_grid)), alpha_, grid_[i - 1]);
        }
        if (std::abs(grid_.back() - c1) > 1e-6) {
            throw BranchFailure("tg_closed_form: continuous branch from c0 ends at distance " +
                                std::to_string(std::abs(grid_.back() - c1)) + " from c1");
        }
    }

    Complex q(double t) const noexcept { return (1.0 - t) * q0_ + t * q1_; }

    Complex operator()(double t) const {
        if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("tg_closed_form: t must lie in [0, 1]");
        if (q0_ == q1_) return grid_.front();
        const auto i = std::size_t(std::floor(t * double(detail::branch_grid)));
        return detail::closer_root(q(t), alpha_, grid_[std::min(i, detail::branch_grid)]);
    }

    /// dc/dt = q'(t) / (2c + alpha).
    Complex velocity(double t) const { return (q1_ - q0_) / (2.0 * (*this)(t) + alpha_); }

private:
    double alpha_;
    Complex q0_, q1_;
    std::vector<Complex> grid_;
};

inline Complex tg_closed_form(Complex c0, Complex c1, double alpha, double t) { return TGClosedForm(c0, c1, alpha)(t); }

/// Initial reduced velocity a(0) whose RK4 trajectory ends at c(1) = c1,
/// by complex secant iteration (the flow map is holomorphic in a(0)).
inline Complex tg_shooting_velocity(Complex c0, Complex c1, double alpha, std::size_t steps = 1000, double tol = 1e-10) {
    auto miss = [&](Complex a0) { return tg_ode_integrate({c0, a0}, alpha, 1.0, steps).back().c - c1; };
    // Exact for the continuous system: c'(0) = (q1 - q0) / (2 c0 + alpha).
    Complex a_prev = (c1 * c1 + alpha * c1 - c0 * c0 - alpha * c0) / ((2.0 * c0 + alpha) * c0);
    Complex a_cur = a_prev * 1.001 + 1e-6;
    Complex f_prev = miss(a_prev), f_cur = miss(a_cur);
    for (int it = 0; it < 100; ++it) {
        if (std::abs(f_cur) <= tol) return a_cur;
        const Complex denom = f_cur - f_prev;
        if (denom == Complex{}) break;
        const Complex a_next = a_cur - f_cur * (a_cur - a_prev) / denom;
        a_prev = a_cur;
        f_prev = f_cur;
        a_cur = a_next;
        f_cur = miss(a_cur);
    }
    if (std::abs(f_cur) <= tol) return a_cur;
    throw BranchFailure("tg_shooting_velocity: secant iteration did not reach c1");
}

/// Geodesic of (|c|^2/2 + alpha)|dc|^2 from c0 to c1 sampled at steps + 1
/// uniform times, by RK4 shooting with a Newton iteration on c'(0).
inline std::vector<Complex> linear_geodesic_reference(Complex c0, Complex c1, double alpha, std::size_t steps = 2000,
                                                      double tol = 1e-13) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("linear_geodesic_reference: alpha must be >= 0");
    if (steps == 0) throw std::invalid_argument("linear_geodesic_reference: steps must be positive");
    struct State {
        Complex c, v;
    };
    auto rhs = [alpha](const State& s) {
        return State{s.v, -std::conj(s.c) * s.v * s.v / (std::norm(s.c) + 2.0 * alpha)};
    };
    auto shoot = [&](Complex v0, std::vector<Complex>* out) {
        const double dt = 1.0 / double(steps);
        State s{c0, v0};
        if (out) out->assign(1, c0);
        for (std::size_t i = 0; i < steps; ++i) {
            const State k1 = rhs(s);
            const State k2 = rhs({s.c + 0.5 * dt * k1.c, s.v + 0.5 * dt * k1.v});
            const State k3 = rhs({s.c + 0.5 * dt * k2.c, s.v + 0.5 * dt * k2.v});
            const State k4 = rhs({s.c + dt * k3.c, s.v + dt * k3.v});
            s.c += dt / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
            s.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
            if (out) out->push_back(s.c);
        }
        return s.c - c1;
    };

    // The map v0 -> c(1) is not holomorphic for alpha > 0, so Newton runs on
    // the real 2x2 Jacobian from central differences.
    Complex v0 = c1 - c0;
    for (int it = 0; it < 60; ++it) {
        const Complex f = shoot(v0, nullptr);
        if (std::abs(f) <= tol) break;
        const double eps = 1e-7 * std::max(1.0, std::abs(v0));
        const Complex dx = (shoot(v0 + eps, nullptr) - shoot(v0 - eps, nullptr)) / (2.0 * eps);
        const Complex dy = (shoot(v0 + Complex(0, eps), nullptr) - shoot(v0 - Complex(0, eps), nullptr)) / (2.0 * eps);
        const double det = dx.real() * dy.imag() - dy.real() * dx.imag();
        if (det == 0.0) throw BranchFailure("linear_geodesic_reference: singular shooting Jacobian");
        const double du = (dy.imag() * f.real() - dy.real() * f.imag()) / det;
        const double dv = (-dx.imag() * f.real() + dx.real() * f.imag()) / det;
        v0 -= Complex(du, dv);
        if (it == 59) throw BranchFailure("linear_geodesic_reference: shooting did not converge");
    }
    std::vector<Complex> out;
    shoot(v0, &out);
    if (std::abs(out.back() - c1) > 1e-10) throw BranchFailure("linear_geodesic_reference: endpoint missed");
    return out;
}

}  // namespace confgeo
