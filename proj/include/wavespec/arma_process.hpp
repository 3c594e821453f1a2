#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavespec/fft.hpp"
#include "wavespec/grid_function.hpp"
#include "wavespec/rng.hpp"

namespace wavespec {

namespace detail {

/// Schur-Cohn test: all roots of z^p + c[1] z^{p-1} + ... + c[p] strictly
/// inside the unit circle. Used on the reciprocal of the AR polynomial, so
/// passing means the AR polynomial has no roots in the closed unit disk.
inline bool schur_stable(std::vector<double> coeff) {
    // coeff holds (1, c1, ..., cp), monic, highest degree first
    while (coeff.size() > 1) {
        const double k = coeff.back();
        if (std::abs(k) >= 1.0 - 1e-12) return false;
        const std::size_t p = coeff.size() - 1;
        std::vector<double> next(p);
        const double denom = 1.0 - k * k;
        for (std::size_t i = 0; i < p; ++i)
            next[i] = (coeff[i] - k * coeff[p - i]) / denom;
        coeff = std::move(next);
    }
    return true;
}

} // namespace detail

/**
 * Parameters of a Gaussian ARMA(p, q) process superposed with independent
 * white noise: X_t = Y_t + c0 Z_t where
 * Y_t + a1 Y_{t-1} + ... + ap Y_{t-p} = b0 e_t + ... + bq e_{t-q}.
 *
 * The driving innovations e_t and the noise Z_t are independent Gaussian
 * white sequences; Z_t always has unit variance, e_t has variance
 * innovation_variance (1 by default).
 */
struct ArmaNoiseParams {
    std::vector<double> ar;     // a_1 .. a_p
    std::vector<double> ma;     // b_0 .. b_q
    double noise_scale = 0.0;   // c_0 >= 0
    double innovation_variance = 1.0;

    ArmaNoiseParams(std::vector<double> ar_coeffs, std::vector<double> ma_coeffs,
                    double c0, double sigma2 = 1.0)
        : ar(std::move(ar_coeffs)), ma(std::move(ma_coeffs)),
          noise_scale(c0), innovation_variance(sigma2) {
        if (noise_scale < 0.0) throw std::invalid_argument("ArmaNoiseParams: c0 must be >= 0");
        if (!(innovation_variance > 0.0))
            throw std::invalid_argument("ArmaNoiseParams: innovation variance must be > 0");
        // stationarity: a(z) = 1 + a1 z + ... + ap z^p must have all roots
        // strictly outside the closed unit disk (causal recursion)
        if (!ar.empty()) {
            std::vector<double> rev(ar.size() + 1);
            rev[0] = 1.0;
            for (std::size_t i = 0; i < ar.size(); ++i) rev[i + 1] = ar[i];
            if (!detail::schur_stable(rev))
                throw std::invalid_argument("ArmaNoiseParams: AR polynomial has a root in the closed unit disk");
        }
    }
};

/// A finite sample path. The seed is kept for provenance when simulated.
struct TimeSeries {
    std::vector<double> samples;
    std::optional<std::uint64_t> seed;

    std::size_t size() const { return samples.size(); }
};

/// Number of warm-up samples discarded before recording a simulated path.
inline constexpr std::size_t kSimulationBurnIn = 1000;

/**
 * Simulates X_t = Y_t + c0 Z_t by running the ARMA recursion from zero
 * initial conditions and discarding a burn-in prefix. Deterministic given
 * the seed.
 */
inline TimeSeries simulate(const ArmaNoiseParams& params, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("simulate: need n >= 2");
    const std::size_t p = params.ar.size();
    const std::size_t q = params.ma.empty() ? 0 : params.ma.size() - 1;
    const double sigma = std::sqrt(params.innovation_variance);

    GaussianStream innovations(seed, 0);
    GaussianStream noise(seed, 1);

    const std::size_t total = kSimulationBurnIn + n;
    std::vector<double> y(total, 0.0);
    std::vector<double> eps(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) eps[t] = sigma * innovations.next();

    for (std::size_t t = 0; t < total; ++t) {
        double v = 0.0;
        for (std::size_t j = 0; j <= q; ++j)
            if (t >= j) v += params.ma[j] * eps[t - j];
        for (std::size_t i = 1; i <= p; ++i)
            if (t >= i) v -= params.ar[i - 1] * y[t - i];
        y[t] = v;
    }

    TimeSeries out;
    out.seed = seed;
    out.samples.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        out.samples[t] = y[kSimulationBurnIn + t] + params.noise_scale * noise.next();
    return out;
}

/**
 * Exact spectral density of the model on the dyadic grid,
 * f(w) = (sigma^2 / 2pi) |b(e^{i 2 pi w})|^2 / |a(e^{i 2 pi w})|^2 + c0^2 / 2pi.
 * Strictly positive whenever c0 > 0 or the MA polynomial has no zero on the
 * unit circle.
 */
inline GridFunction true_spectral_density(const ArmaNoiseParams& params, int grid_exponent) {
    const double two_pi = 2.0 * 3.14159265358979323846;
    GridFunction f(grid_exponent);
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = two_pi * f.omega(i);
        std::complex<double> a(1.0, 0.0), b(0.0, 0.0);
        for (std::size_t k = 0; k < params.ar.size(); ++k)
            a += params.ar[k] * std::polar(1.0, w * static_cast<double>(k + 1));
        for (std::size_t k = 0; k < params.ma.size(); ++k)
            b += params.ma[k] * std::polar(1.0, w * static_cast<double>(k));
        const double ratio = std::norm(b) / std::norm(a);
        f.values[i] = (params.innovation_variance * ratio + params.noise_scale * params.noise_scale) / two_pi;
    }
    return f;
}

/// Quadrature resolution used to invert the spectral density.
inline constexpr int kCovarianceQuadratureExponent = 16;

/**
 * Covariance sequence rho(0..max_lag) of the model, recovered from the exact
 * spectral density by high-resolution quadrature. With the f convention above
 * (1/2pi in front of the covariance series), rho(h) = 2pi * int f e^{-i2pi w h}.
 */
inline std::vector<double> true_covariance(const ArmaNoiseParams& params, std::size_t max_lag) {
    const int J = kCovarianceQuadratureExponent;
    const GridFunction f = true_spectral_density(params, J);
    if (max_lag >= f.size() / 2) throw std::invalid_argument("true_covariance: max_lag too large");
    auto spectrum = fft_real(f.values);
    const double two_pi = 2.0 * 3.14159265358979323846;
    std::vector<double> rho(max_lag + 1);
    for (std::size_t h = 0; h <= max_lag; ++h)
        rho[h] = two_pi * spectrum[h].real() / static_cast<double>(f.size());
    return rho;
}

/// Single-column CSV, one sample per line, no header.
inline void write_series_csv(const TimeSeries& ts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    for (double v : ts.samples) out << v << '\n';
}

inline TimeSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    TimeSeries ts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ts.samples.push_back(std::stod(line));
    }
    if (ts.samples.size() < 2) throw std::runtime_error("time series csv has fewer than 2 samples");
    return ts;
}

} // namespace wavespec
