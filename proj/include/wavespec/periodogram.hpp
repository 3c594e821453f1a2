#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "wavespec/arma_process.hpp"
#include "wavespec/fft.hpp"
#include "wavespec/grid_function.hpp"

namespace wavespec {

/**
 * Classical mean-corrected periodogram
 *   I_n(w) = (1 / 2 pi n) | sum_t (X_t - mean) e^{i 2 pi w t} |^2
 * evaluated exactly at every grid frequency w = i / 2^J.
 *
 * Evaluation folds the centered samples modulo 2^J before a single FFT, which
 * gives the exact value of the defining sum for any n (zero-padding when
 * 2^J >= n, time-domain aliasing of the kernel otherwise). 2^J >= n is the
 * recommended regime. Tiny negative rounding residues are clamped to zero so
 * that downstream logarithms stay defined.
 */
inline GridFunction periodogram(const TimeSeries& series, int grid_exponent) {
    const std::size_t n = series.size();
    if (n < 2) throw std::invalid_argument("periodogram: need n >= 2");
    const std::size_t grid = std::size_t{1} << grid_exponent;

    double mean = 0.0;
    for (double v : series.samples) mean += v;
    mean /= static_cast<double>(n);

    std::vector<std::complex<double>> folded(grid, std::complex<double>(0.0, 0.0));
    for (std::size_t t = 0; t < n; ++t)
        folded[t % grid] += series.samples[t] - mean;
    fft_inplace(folded);

    const double scale = 1.0 / (2.0 * 3.14159265358979323846 * static_cast<double>(n));
    GridFunction out(grid_exponent);
    for (std::size_t i = 0; i < grid; ++i) {
        const double v = scale * std::norm(folded[i]);
        out.values[i] = v < 0.0 ? 0.0 : v;
    }
    return out;
}

/// Default analysis grid: fine enough for the data and for quadrature at the
/// finest wavelet level j1.
inline int default_grid_exponent(std::size_t n, int j1) {
    int jn = 0;
    while ((std::size_t{1} << jn) < n) ++jn;
    return std::max(jn, j1 + 4);
}

/**
 * Bias constant C* = sqrt((C2 + 39 C1^2) / (4 pi^2)) from a covariance
 * sequence rho(0..H), with C1 = sum_h |rho(h)| and C2 = sum_h |h rho(h)^2|
 * taken over h in {-H..H} using rho(-h) = rho(h).
 */
inline double bias_constant(std::span<const double> rho) {
    if (rho.empty()) throw std::invalid_argument("bias_constant: empty covariance sequence");
    double c1 = std::abs(rho[0]);
    double c2 = 0.0;
    for (std::size_t h = 1; h < rho.size(); ++h) {
        c1 += 2.0 * std::abs(rho[h]);
        c2 += 2.0 * static_cast<double>(h) * rho[h] * rho[h];
    }
    const double pi = 3.14159265358979323846;
    return std::sqrt((c2 + 39.0 * c1 * c1) / (4.0 * pi * pi));
}

} // namespace wavespec
