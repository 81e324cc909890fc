#pragma once

/// Truncated Taylor series on the unit disk.
///
/// A `Polynomial` holds the dense coefficients c_0..c_{n-1} of
/// phi(z) = sum c_i z^i.  The length n is the degree bound and is significant:
/// trailing zeros are kept, so two polynomials with the same values but
/// different bounds are different objects.  Whether phi has a nonvanishing
/// derivative on the closed disk is not part of the type; see
/// `certify_conformal` in geodesic_solver.hpp.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "confgeo/fft.hpp"

namespace confgeo {

using Complex = std::complex<double>;

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::size_t degree_bound) : coeffs_(degree_bound) {}
    Polynomial(std::initializer_list<Complex> coeffs) : coeffs_(coeffs) {}
    explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {}

    /// z^k padded to the given degree bound.
    static Polynomial monomial(std::size_t k, std::size_t degree_bound, Complex scale = 1.0) {
        if (k >= degree_bound) throw std::invalid_argument("monomial: exponent exceeds degree bound");
        Polynomial p(degree_bound);
        p.coeffs_[k] = scale;
        return p;
    }

    /// The identity map z with the given degree bound (>= 2).
    static Polynomial identity(std::size_t degree_bound) { return monomial(1, degree_bound); }

    std::size_t size() const noexcept { return coeffs_.size(); }
    bool empty() const noexcept { return coeffs_.empty(); }

    Complex& operator[](std::size_t i) { return coeffs_[i]; }
    const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

    /// Coefficient i, or zero past the degree bound.
    Complex coeff(std::size_t i) const noexcept { return i < coeffs_.size() ? coeffs_[i] : Complex{}; }

    std::span<const Complex> coeffs() const noexcept { return coeffs_; }
    std::span<Complex> coeffs() noexcept { return coeffs_; }

    /// Copy with the degree bound changed: truncates or zero-pads.
    Polynomial resized(std::size_t degree_bound) const {
        Polynomial out(degree_bound);
        std::copy_n(coeffs_.begin(), std::min(degree_bound, coeffs_.size()), out.coeffs_.begin());
        return out;
    }

    /// Horner evaluation.
    Complex operator()(Complex z) const noexcept {
        Complex acc{};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.size() > size()) coeffs_.resize(o.size());
        for (std::size_t i = 0; i < o.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.size() > size()) coeffs_.resize(o.size());
        for (std::size_t i = 0; i < o.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    Polynomial& operator*=(Complex s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, Complex s) { return a *= s; }
    friend Polynomial operator*(Complex s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
        os << '[';
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p.coeffs_[i];
        return os << ']';
    }

private:
    std::vector<Complex> coeffs_;
};

using ConformalPolynomial = Polynomial;

/// Complex derivative; keeps the degree bound, so the top coefficient is zero.
inline Polynomial derivative(const Polynomial& p) {
    Polynomial out(p.size());
    for (std::size_t i = 0; i + 1 < p.size(); ++i) out[i] = double(i + 1) * p[i + 1];
    return out;
}

/// Exact O(n_p n_q) convolution; the result has degree bound n_p + n_q - 1.
inline Polynomial mul_naive(const Polynomial& p, const Polynomial& q) {
    if (p.empty() || q.empty()) return Polynomial{};
    Polynomial out(p.size() + q.size() - 1);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Complex pi = p[i];
        if (pi == Complex{}) continue;
        for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += pi * q[j];
    }
    return out;
}

/// FFT convolution.  Transform length is the next power of two that holds the
/// full product, so nothing wraps around.
inline Polynomial mul_fft(const Polynomial& p, const Polynomial& q) {
    if (p.empty() || q.empty()) return Polynomial{};
    const std::size_t out_len = p.size() + q.size() - 1;
    const std::size_t len = next_pow2(out_len);

    std::vector<Complex> a(len), b(len);
    std::copy(p.coeffs().begin(), p.coeffs().end(), a.begin());
    std::copy(q.coeffs().begin(), q.coeffs().end(), b.begin());
    fft<double>(a);
    fft<double>(b);
    for (std::size_t k = 0; k < len; ++k) a[k] *= b[k];
    fft<double>(a, true);

    a.resize(out_len);
    return Polynomial(std::move(a));
}

/// L^2(D) norm of the monomial z^i squared: the integral of |z|^{2i} over the disk.
inline double monomial_norm2(std::size_t i) noexcept { return std::numbers::pi / double(i + 1); }

/// <p, q>_{L^2(D)} = sum_i p_i conj(q_i) pi/(i+1); linear in p, conjugate-linear in q.
inline Complex inner_l2(const Polynomial& p, const Polynomial& q) {
    const std::size_t n = std::min(p.size(), q.size());
    Complex acc{};
    for (std::size_t i = 0; i < n; ++i) acc += p[i] * std::conj(q[i]) * monomial_norm2(i);
    return acc;
}

/// ||p||^2 in L^2(D).  Same value as inner_l2(p, p).real() without the
/// imaginary round-off.
inline double norm2_l2(const Polynomial& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::norm(p[i]) * monomial_norm2(i);
    return acc;
}

/// <p, q>_{L^2} + alpha <p', q'>_{L^2}.
inline Complex inner_h1alpha(const Polynomial& p, const Polynomial& q, double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("inner_h1alpha: alpha must be nonnegative");
    if (alpha == 0.0) return inner_l2(p, q);
    return inner_l2(p, q) + alpha * inner_l2(derivative(p), derivative(q));
}

/// Adjoint of d/dz with respect to the disk L^2 product:
/// xi -> d/dz (z^2 xi) = 2 z xi + z^2 xi'.  Coefficient i moves to i+1 with
/// factor (i+2); the degree bound grows by one.
inline Polynomial adjoint_dz(const Polynomial& xi) {
    Polynomial out(xi.size() + 1);
    for (std::size_t i = 0; i < xi.size(); ++i) out[i + 1] = double(i + 2) * xi[i];
    return out;
}

}  // namespace confgeo
