#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace confgeo {

/// Smallest power of two >= n (and >= 1).
inline std::size_t next_pow2(std::size_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

/// In-place iterative radix-2 Cooley-Tukey transform.
///
/// Forward uses the kernel exp(-2 pi i jk/L); the inverse includes the 1/L
/// normalisation so that `fft(x, true)` undoes `fft(x, false)`.  The length
/// must be a power of two.
template <typename Real>
void fft(std::span<std::complex<Real>> data, bool inverse = false) {
    const std::size_t len = data.size();
    if (len <= 1) return;
    if (!std::has_single_bit(len)) throw std::invalid_argument("fft: length must be a power of two");

    for (std::size_t i = 1, j = 0; i < len; ++i) {
        std::size_t bit = len >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    // Twiddles are generated directly from std::polar for every index rather
    // than by repeated multiplication, so round-off does not accumulate.
    const Real sign = inverse ? Real(1) : Real(-1);
    std::vector<std::complex<Real>> twiddle(len / 2);
    for (std::size_t k = 0; k < len / 2; ++k) {
        twiddle[k] = std::polar(Real(1), sign * Real(2) * std::numbers::pi_v<Real> * Real(k) / Real(len));
    }

    for (std::size_t half = 1; half < len; half <<= 1) {
        const std::size_t stride = len / (2 * half);
        for (std::size_t start = 0; start < len; start += 2 * half) {
            for (std::size_t k = 0; k < half; ++k) {
                const auto u = data[start + k];
                const auto v = data[start + k + half] * twiddle[k * stride];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
    }

    if (inverse) {
        const Real scale = Real(1) / Real(len);
        for (auto& x : data) x *= scale;
    }
}

}  // namespace confgeo
