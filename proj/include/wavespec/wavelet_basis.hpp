#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wavespec/grid_function.hpp"

namespace wavespec {

/**
 * Coefficients of the periodized multiresolution decomposition: 2^j0 scaling
 * coefficients a_{j0,k} plus detail coefficients b_{j,k} for levels
 * j0 <= j < j1. The index set Lambda_{j1} has cardinality 2^{j1}.
 */
struct WaveletCoefficients {
    int j0 = 0;
    int j1 = 0;
    std::vector<double> scaling;               // a_{j0,k}, size 2^j0
    std::vector<std::vector<double>> details;  // details[j - j0] has size 2^j

    std::size_t count() const { return std::size_t{1} << j1; }

    const std::vector<double>& detail(int j) const {
        if (j < j0 || j >= j1) throw std::invalid_argument("detail level out of range");
        return details[static_cast<std::size_t>(j - j0)];
    }
    std::vector<double>& detail(int j) {
        if (j < j0 || j >= j1) throw std::invalid_argument("detail level out of range");
        return details[static_cast<std::size_t>(j - j0)];
    }

    /// Flattens to the Lambda_{j1} ordering: scaling first, then details by (j, k).
    std::vector<double> to_lambda_vector() const {
        std::vector<double> v;
        v.reserve(count());
        v.insert(v.end(), scaling.begin(), scaling.end());
        for (const auto& d : details) v.insert(v.end(), d.begin(), d.end());
        return v;
    }

    static WaveletCoefficients from_lambda_vector(int j0, int j1, const std::vector<double>& v) {
        if (v.size() != (std::size_t{1} << j1))
            throw std::invalid_argument("lambda vector size mismatch");
        WaveletCoefficients c;
        c.j0 = j0;
        c.j1 = j1;
        std::size_t pos = 0;
        c.scaling.assign(v.begin(), v.begin() + (std::ptrdiff_t{1} << j0));
        pos += std::size_t{1} << j0;
        for (int j = j0; j < j1; ++j) {
            const std::size_t len = std::size_t{1} << j;
            c.details.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(pos),
                                   v.begin() + static_cast<std::ptrdiff_t>(pos + len));
            pos += len;
        }
        return c;
    }
};

/// Deterministic enumeration of Lambda_{j1}: scaling entries tagged with
/// level j0 - 1 first, then details by increasing (j, k).
inline std::vector<std::pair<int, int>> lambda_index(int j0, int j1) {
    if (j0 < 0 || j0 > j1) throw std::invalid_argument("lambda_index: need 0 <= j0 <= j1");
    std::vector<std::pair<int, int>> idx;
    idx.reserve(std::size_t{1} << j1);
    for (int k = 0; k < (1 << j0); ++k) idx.emplace_back(j0 - 1, k);
    for (int j = j0; j < j1; ++j)
        for (int k = 0; k < (1 << j); ++k) idx.emplace_back(j, k);
    return idx;
}

/**
 * Periodized orthonormal multiresolution analysis on [0, 1].
 *
 * Provides the forward/inverse coefficient transforms for grid-sampled
 * functions and pointwise samples of the periodized basis functions. The
 * continuous inner products <g, psi_{j,k}> are identified with rectangle-rule
 * quadrature on the grid, which makes the identification exact on V_J: the
 * transform of the samples scaled by 2^{-J/2} *is* the grid quadrature of g
 * against the sampled basis functions.
 *
 * Supported filters: "symmlet8" (default in the estimators) and "haar"
 * (analytically checkable). Immutable after construction.
 */
class WaveletBasis {
public:
    static WaveletBasis build(const std::string& filter_name, int grid_exponent) {
        if (grid_exponent < 6 || grid_exponent > 22)
            throw std::invalid_argument("WaveletBasis: grid exponent must be in [6, 22]");
        std::vector<double> h;
        if (filter_name == "haar") {
            const double r = 1.0 / std::sqrt(2.0);
            h = {r, r};
        } else if (filter_name == "symmlet8") {
            h = {-0.0033824159510050028, -0.0005421323318000115,
                 0.03169508781152599,    0.007607487324976606,
                 -0.14329423835127267,   -0.06127335906781106,
                 0.4813596512590533,     0.777185751699628,
                 0.364441894836179,      -0.05194583810788169,
                 -0.027219029917103454,  0.04913717967373032,
                 0.0038087520138945026,  -0.014952258337062197,
                 -0.0003029205147241353, 0.0018899503327676887};
        } else {
            throw std::invalid_argument("WaveletBasis: unsupported filter '" + filter_name + "'");
        }
        return WaveletBasis(filter_name, grid_exponent, std::move(h));
    }

    const std::string& filter_name() const { return name_; }
    int grid_exponent() const { return grid_exponent_; }
    std::size_t grid_size() const { return std::size_t{1} << grid_exponent_; }
    const std::vector<double>& lowpass() const { return h_; }
    const std::vector<double>& highpass() const { return g_; }

    /// Cached sup norm of the mother wavelet / scaling function, computed by
    /// the cascade algorithm at resolution 2^14 independently of the grid.
    double psi_sup() const { return psi_sup_; }
    double phi_sup() const { return phi_sup_; }

    /**
     * Forward transform: scaling coefficients at level j0 and details at
     * levels j0..j1-1 of the sampled function g, computed from the periodic
     * fast wavelet transform of the samples scaled by 2^{-J/2}.
     */
    WaveletCoefficients analyze(const GridFunction& g, int j0, int j1) const {
        if (g.grid_exponent != grid_exponent_)
            throw std::invalid_argument("analyze: grid exponent does not match basis");
        if (j0 < 0 || j0 > j1 || j1 > grid_exponent_)
            throw std::invalid_argument("analyze: need 0 <= j0 <= j1 <= J");
        const double scale = std::pow(2.0, -0.5 * grid_exponent_);
        std::vector<double> v(g.values.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.values[i] * scale;

        WaveletCoefficients out;
        out.j0 = j0;
        out.j1 = j1;
        out.details.resize(static_cast<std::size_t>(j1 - j0));
        std::vector<double> a, d;
        for (int j = grid_exponent_ - 1; j >= j0; --j) {
            analysis_step(v, a, d);
            if (j < j1) out.details[static_cast<std::size_t>(j - j0)] = d;
            v.swap(a);
        }
        out.scaling = std::move(v);
        return out;
    }

    /// Inverse transform: samples of the partial sum defined by the
    /// coefficients, zero-filling every level not present.
    GridFunction synthesize(const WaveletCoefficients& c) const {
        if (c.j0 < 0 || c.j0 > c.j1 || c.j1 > grid_exponent_)
            throw std::invalid_argument("synthesize: coefficient levels exceed basis grid");
        if (c.scaling.size() != (std::size_t{1} << c.j0))
            throw std::invalid_argument("synthesize: scaling coefficient count mismatch");
        std::vector<double> v = c.scaling;
        std::vector<double> next;
        std::vector<double> zeros;
        for (int j = c.j0; j < grid_exponent_; ++j) {
            const std::vector<double>* d;
            if (j < c.j1) {
                d = &c.details[static_cast<std::size_t>(j - c.j0)];
                if (d->size() != (std::size_t{1} << j))
                    throw std::invalid_argument("synthesize: detail count mismatch at level " + std::to_string(j));
            } else {
                zeros.assign(std::size_t{1} << j, 0.0);
                d = &zeros;
            }
            synthesis_step(v, *d, next);
            v.swap(next);
        }
        const double scale = std::pow(2.0, 0.5 * grid_exponent_);
        GridFunction g(grid_exponent_);
        for (std::size_t i = 0; i < v.size(); ++i) g.values[i] = v[i] * scale;
        return g;
    }

    /// Samples of the periodized phi_{j,0} on the grid (levels 0..J-1 cached).
    const std::vector<double>& scaling_base(int j) const {
        if (j < 0 || j >= grid_exponent_) throw std::invalid_argument("scaling_base: level out of range");
        return phi_base_[static_cast<std::size_t>(j)];
    }
    /// Samples of the periodized psi_{j,0} on the grid.
    const std::vector<double>& wavelet_base(int j) const {
        if (j < 0 || j >= grid_exponent_) throw std::invalid_argument("wavelet_base: level out of range");
        return psi_base_[static_cast<std::size_t>(j)];
    }

    /// phi_{j,k}(i / 2^J); the periodized basis is translation invariant,
    /// phi_{j,k}(x) = phi_{j,0}(x - k 2^{-j}).
    double scaling_sample(int j, int k, std::size_t i) const {
        return scaling_base(j)[shifted_index(j, k, i)];
    }
    double wavelet_sample(int j, int k, std::size_t i) const {
        return wavelet_base(j)[shifted_index(j, k, i)];
    }

    GridFunction scaling_function(int j, int k) const {
        GridFunction g(grid_exponent_);
        for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = scaling_sample(j, k, i);
        return g;
    }
    GridFunction wavelet_function(int j, int k) const {
        GridFunction g(grid_exponent_);
        for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = wavelet_sample(j, k, i);
        return g;
    }

private:
    WaveletBasis(std::string name, int grid_exponent, std::vector<double> h)
        : name_(std::move(name)), grid_exponent_(grid_exponent), h_(std::move(h)) {
        const std::size_t L = h_.size();
        g_.resize(L);
        for (std::size_t m = 0; m < L; ++m)
            g_[m] = ((m % 2 == 0) ? 1.0 : -1.0) * h_[L - 1 - m];

        phi_sup_ = cascade_sup(false);
        psi_sup_ = cascade_sup(true);

        phi_base_.resize(static_cast<std::size_t>(grid_exponent_));
        psi_base_.resize(static_cast<std::size_t>(grid_exponent_));
        for (int j = 0; j < grid_exponent_; ++j) {
            WaveletCoefficients unit;
            unit.j0 = j;
            unit.j1 = j;
            unit.scaling.assign(std::size_t{1} << j, 0.0);
            unit.scaling[0] = 1.0;
            phi_base_[static_cast<std::size_t>(j)] = synthesize(unit).values;

            unit.j1 = j + 1;
            unit.scaling.assign(std::size_t{1} << j, 0.0);
            unit.details.assign(1, std::vector<double>(std::size_t{1} << j, 0.0));
            unit.details[0][0] = 1.0;
            psi_base_[static_cast<std::size_t>(j)] = synthesize(unit).values;
            unit.details.clear();
        }
    }

    std::size_t shifted_index(int j, int k, std::size_t i) const {
        const std::size_t n = grid_size();
        const std::size_t shift = (static_cast<std::size_t>(k) << (grid_exponent_ - j)) % n;
        return (i + n - shift) % n;
    }

    void analysis_step(const std::vector<double>& v, std::vector<double>& a, std::vector<double>& d) const {
        const std::size_t M = v.size();
        const std::size_t half = M / 2;
        const std::size_t L = h_.size();
        a.assign(half, 0.0);
        d.assign(half, 0.0);
        for (std::size_t k = 0; k < half; ++k) {
            const std::size_t base = 2 * k;
            double sa = 0.0, sd = 0.0;
            if (base + L <= M) {
                const double* x = v.data() + base;
                for (std::size_t m = 0; m < L; ++m) {
                    sa += h_[m] * x[m];
                    sd += g_[m] * x[m];
                }
            } else {
                for (std::size_t m = 0; m < L; ++m) {
                    const double x = v[(base + m) % M];
                    sa += h_[m] * x;
                    sd += g_[m] * x;
                }
            }
            a[k] = sa;
            d[k] = sd;
        }
    }

    void synthesis_step(const std::vector<double>& a, const std::vector<double>& d, std::vector<double>& v) const {
        const std::size_t half = a.size();
        const std::size_t M = 2 * half;
        const std::size_t L = h_.size();
        v.assign(M, 0.0);
        for (std::size_t k = 0; k < half; ++k) {
            const std::size_t base = 2 * k;
            const double ak = a[k];
            const double dk = d[k];
            if (base + L <= M) {
                double* x = v.data() + base;
                for (std::size_t m = 0; m < L; ++m) x[m] += h_[m] * ak + g_[m] * dk;
            } else {
                for (std::size_t m = 0; m < L; ++m) v[(base + m) % M] += h_[m] * ak + g_[m] * dk;
            }
        }
    }

    /// Sup norm of the mother wavelet (or scaling function) by refining a
    /// single coarse-level atom to resolution 2^14. The coarse level is the
    /// smallest at which the support fits inside [0, 1), so periodization
    /// cannot overlap the atom with itself.
    double cascade_sup(bool wavelet) const {
        const int cascade_exponent = 14;
        const std::size_t L = h_.size();
        int j = 0;
        while ((std::size_t{1} << j) < L - 1) ++j;

        std::vector<double> v;
        std::vector<double> next;
        std::vector<double> zeros;
        if (wavelet) {
            v.assign(std::size_t{1} << j, 0.0);
            std::vector<double> d(std::size_t{1} << j, 0.0);
            d[0] = 1.0;
            synthesis_step(v, d, next);
            v.swap(next);
            ++j;
        } else {
            v.assign(std::size_t{1} << j, 0.0);
            v[0] = 1.0;
        }
        int level = j;
        for (; level < cascade_exponent; ++level) {
            zeros.assign(v.size(), 0.0);
            synthesis_step(v, zeros, next);
            v.swap(next);
        }
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        // v holds 2^{-Jc/2} phi_{j,k} samples; undo both normalizations
        const int base_level = wavelet ? j - 1 : j;
        return m * std::pow(2.0, 0.5 * (cascade_exponent - base_level));
    }

    std::string name_;
    int grid_exponent_;
    std::vector<double> h_;
    std::vector<double> g_;
    double psi_sup_ = 0.0;
    double phi_sup_ = 0.0;
    std::vector<std::vector<double>> phi_base_;
    std::vector<std::vector<double>> psi_base_;
};

inline WaveletBasis build_basis(const std::string& filter_name, int grid_exponent) {
    return WaveletBasis::build(filter_name, grid_exponent);
}

inline WaveletCoefficients analyze(const GridFunction& g, int j0, int j1, const WaveletBasis& basis) {
    return basis.analyze(g, j0, j1);
}

inline GridFunction synthesize(const WaveletCoefficients& c, const WaveletBasis& basis) {
    return basis.synthesize(c);
}

/// CSV rows (level, k, value); level j0 - 1 marks scaling coefficients.
inline void write_csv(const WaveletCoefficients& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "level,k,value\n";
    out.precision(17);
    for (std::size_t k = 0; k < c.scaling.size(); ++k)
        out << (c.j0 - 1) << ',' << k << ',' << c.scaling[k] << '\n';
    for (int j = c.j0; j < c.j1; ++j) {
        const auto& d = c.detail(j);
        for (std::size_t k = 0; k < d.size(); ++k)
            out << j << ',' << k << ',' << d[k] << '\n';
    }
}

} // namespace wavespec
