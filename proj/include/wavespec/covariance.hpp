#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavespec/fft.hpp"
#include "wavespec/grid_function.hpp"

namespace wavespec {

enum class CovarianceSource { true_model, linear_estimate, nonlinear_estimate };

inline std::string to_string(CovarianceSource s) {
    switch (s) {
        case CovarianceSource::true_model: return "true";
        case CovarianceSource::linear_estimate: return "linear_estimate";
        default: return "nonlinear_estimate";
    }
}

/// Covariance values for lags 0..H plus the provenance tag. max_asymmetry
/// records sup |f(w) - f(1-w)| of the spectral input; above 1e-6 it flags
/// that an imaginary part was discarded.
struct CovarianceSequence {
    std::vector<double> rho;
    CovarianceSource source = CovarianceSource::nonlinear_estimate;
    double max_asymmetry = 0.0;

    bool asymmetry_warning() const { return max_asymmetry > 1e-6; }
};

/**
 * Inverse transform of a sampled spectral density,
 *   rho(h) = 2 pi * int_0^1 f(w) e^{-i 2 pi w h} dw,
 * by FFT of the grid samples. The 2 pi factor matches the 1/2pi in the
 * spectral density convention, so round-tripping the model density
 * reproduces the model covariance.
 */
inline CovarianceSequence spectral_to_covariance(const GridFunction& f, std::size_t max_lag,
                                                 CovarianceSource tag = CovarianceSource::nonlinear_estimate) {
    if (max_lag >= f.size() / 2)
        throw std::invalid_argument("spectral_to_covariance: max_lag must be below half the grid size");
    CovarianceSequence out;
    out.source = tag;
    out.max_asymmetry = max_asymmetry(f);
    auto spectrum = fft_real(f.values);
    const double two_pi = 2.0 * 3.14159265358979323846;
    out.rho.resize(max_lag + 1);
    for (std::size_t h = 0; h <= max_lag; ++h)
        out.rho[h] = two_pi * spectrum[h].real() / static_cast<double>(f.size());
    return out;
}

namespace detail {

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix; returns the
/// smallest eigenvalue. Plenty accurate for the m <= few hundred sizes used
/// by the Bochner check.
inline double min_symmetric_eigenvalue(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("min_symmetric_eigenvalue: empty matrix");
    if (n == 1) return a[0][0];

    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) frob += a[i][j] * a[i][j];
    const double tol = 1e-30 * (frob + 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off <= tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    double mn = a[0][0];
    for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, a[i][i]);
    return mn;
}

} // namespace detail

/// Smallest eigenvalue of the m x m symmetric Toeplitz matrix [rho(|i-j|)].
/// Nonnegative (up to solver noise) exactly when the sequence passes the
/// Bochner positive-definiteness check at that order.
inline double min_toeplitz_eigenvalue(const CovarianceSequence& cov, std::size_t m) {
    if (m == 0 || m > cov.rho.size())
        throw std::invalid_argument("min_toeplitz_eigenvalue: need 1 <= m <= max lag + 1");
    std::vector<std::vector<double>> a(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            a[i][j] = cov.rho[i > j ? i - j : j - i];
    return detail::min_symmetric_eigenvalue(std::move(a));
}

/// CSV rows (lag, value).
inline void write_csv(const CovarianceSequence& cov, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "lag,value\n";
    out.precision(17);
    for (std::size_t h = 0; h < cov.rho.size(); ++h) out << h << ',' << cov.rho[h] << '\n';
}

} // namespace wavespec
