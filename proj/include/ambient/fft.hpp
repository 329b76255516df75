#pragma once

// Real-input FFT. Even lengths pack the signal into a half-length complex
// transform computed by a mixed-radix Cooley-Tukey recursion; odd lengths
// use the direct O(n^2) sum.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "ambient/error.hpp"

namespace ambient {

using Complex = std::complex<double>;

namespace detail {

inline std::size_t smallest_factor(std::size_t n) {
    if (n % 4 == 0) return 4;
    for (std::size_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return p;
    return n;
}

inline Complex twiddle(std::size_t k, std::size_t n) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

// out[k] = sum_j in[j*stride] * exp(-2 pi i j k / n)
inline void fft_recursive(const Complex* in, std::size_t stride, std::size_t n, Complex* out) {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    const std::size_t p = smallest_factor(n);
    if (p == n) {
        for (std::size_t k = 0; k < n; ++k) {
            Complex acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += in[j * stride] * twiddle(j * k, n);
            out[k] = acc;
        }
        return;
    }
    const std::size_t m = n / p;
    // Sub-transform r lands in out[r*m, (r+1)*m).
    for (std::size_t r = 0; r < p; ++r) fft_recursive(in + r * stride, stride * p, m, out + r * m);
    std::vector<Complex> column(p);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t r = 0; r < p; ++r) column[r] = out[r * m + k] * twiddle(r * k, n);
        for (std::size_t q = 0; q < p; ++q) {
            Complex acc = 0.0;
            for (std::size_t r = 0; r < p; ++r) acc += column[r] * twiddle(r * q * m, n);
            out[q * m + k] = acc;
        }
    }
}

}  // namespace detail

/// Forward complex DFT of any length.
inline std::vector<Complex> fft(std::span<const Complex> x) {
    std::vector<Complex> out(x.size());
    if (!x.empty()) detail::fft_recursive(x.data(), 1, x.size(), out.data());
    return out;
}

/// Direct real-input DFT, bins 0..n/2.
inline std::vector<Complex> rdft_direct(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += x[j] * detail::twiddle(j * k, n);
        out[k] = acc;
    }
    return out;
}

/// Real-input DFT, bins 0..n/2 (unnormalized).
inline std::vector<Complex> rfft(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) throw ArgumentError("rfft of empty signal");
    if (n % 2 != 0) return rdft_direct(x);
    const std::size_t m = n / 2;
    std::vector<Complex> packed(m);
    for (std::size_t j = 0; j < m; ++j) packed[j] = {x[2 * j], x[2 * j + 1]};
    const auto z = fft(packed);
    std::vector<Complex> out(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        const Complex zk = z[k % m];
        const Complex zc = std::conj(z[(m - k) % m]);
        const Complex even = 0.5 * (zk + zc);
        const Complex odd = Complex(0.0, -0.5) * (zk - zc);
        out[k] = even + detail::twiddle(k, n) * odd;
    }
    return out;
}

/// |rfft(x)| scaled by 1/sqrt(n).
inline std::vector<double> magnitude_spectrum(std::span<const double> x) {
    const auto spec = rfft(x);
    const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
    std::vector<double> out(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) out[k] = std::abs(spec[k]) * scale;
    return out;
}

}  // namespace ambient
