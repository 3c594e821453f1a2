#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wavespec {

/// True if n is a power of two (n >= 1).
inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Integer log2 for a power-of-two argument.
inline int log2_exact(std::size_t n) {
    if (!is_power_of_two(n)) throw std::invalid_argument("log2_exact: not a power of two");
    int j = 0;
    while ((std::size_t{1} << j) < n) ++j;
    return j;
}

/**
 * In-place radix-2 Cooley-Tukey transform.
 *
 * Forward convention: X[k] = sum_t x[t] e^{-i 2 pi k t / N}.
 * The inverse applies the conjugate kernel and the 1/N factor.
 */
inline void fft_inplace(std::vector<std::complex<double>>& data, bool inverse = false) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
    if (n == 1) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * 3.14159265358979323846 / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& z : data) z *= scale;
    }
}

/// Forward DFT of a real sequence, returned as a full complex spectrum.
inline std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
    std::vector<std::complex<double>> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::complex<double>(x[i], 0.0);
    fft_inplace(z);
    return z;
}

} // namespace wavespec
