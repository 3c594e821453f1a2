#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wavespec/grid_function.hpp"
#include "wavespec/wavelet_basis.hpp"

namespace wavespec {

struct ScaleLevels {
    int j0 = 0;
    int j1 = 0;
};

/**
 * Adaptive scale rule: smallest j0 with 2^j0 >= log n and smallest j1 with
 * 2^j1 >= n / log n (natural logarithm). Fails loudly when n is too small to
 * give j0 <= j1.
 */
inline ScaleLevels adaptive_scale_levels(std::size_t n) {
    if (n < 8) throw std::invalid_argument("adaptive_scale_levels: need n >= 8");
    const double ln_n = std::log(static_cast<double>(n));
    ScaleLevels s;
    while (std::pow(2.0, s.j0) < ln_n) ++s.j0;
    const double fine = static_cast<double>(n) / ln_n;
    while (std::pow(2.0, s.j1) < fine) ++s.j1;
    if (s.j0 > s.j1)
        throw std::invalid_argument("adaptive_scale_levels: n too small, coarse level exceeds fine level");
    return s;
}

/// Linear rule: j0 = 0, j1 the largest integer with 2^{j1} <= n^{1/(2s+1)}.
inline ScaleLevels linear_scale_levels(std::size_t n, double smoothness) {
    if (n < 8) throw std::invalid_argument("linear_scale_levels: need n >= 8");
    if (!(smoothness > 0.5)) throw std::invalid_argument("linear_scale_levels: need s > 1/2");
    ScaleLevels s;
    s.j0 = 0;
    const double bound = std::pow(static_cast<double>(n), 1.0 / (2.0 * smoothness + 1.0));
    while (std::pow(2.0, s.j1 + 1) <= bound * (1.0 + 1e-12)) ++s.j1;
    return s;
}

/// Hard thresholding rule x * I(|x| >= xi); the boundary |x| = xi is kept.
inline double hard_threshold(double x, double xi) {
    if (xi < 0.0) throw std::invalid_argument("hard_threshold: xi must be >= 0");
    return std::abs(x) >= xi ? x : 0.0;
}

/**
 * Level-dependent oracle threshold
 *   xi_{j,n} = 2 [ 2 ||f||_inf ( sqrt(d ln n / n) + 2^{j/2} ||psi||_inf d ln n / n ) + C* / sqrt(n) ].
 * delta >= 6 is the theoretically supported regime; smaller values are permitted.
 */
inline double oracle_threshold(int j, std::size_t n, double f_sup, double c_star,
                               double delta, double psi_sup) {
    if (n < 2) throw std::invalid_argument("oracle_threshold: need n >= 2");
    if (delta < 0.0) throw std::invalid_argument("oracle_threshold: delta must be >= 0");
    const double ln_over_n = delta * std::log(static_cast<double>(n)) / static_cast<double>(n);
    return 2.0 * (2.0 * f_sup * (std::sqrt(ln_over_n) + std::pow(2.0, 0.5 * j) * psi_sup * ln_over_n)
                  + c_star / std::sqrt(static_cast<double>(n)));
}

/**
 * Sup-norm pre-estimate: the infinite norm of the least-squares projection of
 * the periodogram onto piecewise polynomials of degree r on the dyadic
 * partition with 2^{J_n} intervals, where J_n is the largest exponent obeying
 * the dimension budget N_n = (r+1) 2^{J_n} <= kappa / (r+1)^2 * n / log n.
 */
struct SupNormEstimate {
    double value = 0.0;
    int degree = 0;             // r
    int partition_exponent = 0; // J_n
    std::size_t dimension = 0;  // N_n = (r+1) 2^{J_n}
    double kappa = 0.0;
};

inline SupNormEstimate sup_norm_estimate(const GridFunction& pg, std::size_t n, int degree, double kappa) {
    if (degree < 0) throw std::invalid_argument("sup_norm_estimate: degree must be >= 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("sup_norm_estimate: kappa must be > 0");
    if (n < 8) throw std::invalid_argument("sup_norm_estimate: need n >= 8");

    const double r1 = static_cast<double>(degree + 1);
    const double budget = kappa / (r1 * r1) * static_cast<double>(n) / std::log(static_cast<double>(n));
    if (r1 > budget)
        throw std::invalid_argument("sup_norm_estimate: no admissible partition, n too small for this degree and kappa");
    int jn = 0;
    while (r1 * std::pow(2.0, jn + 1) <= budget && jn + 1 <= pg.grid_exponent) ++jn;

    const std::size_t bins = std::size_t{1} << jn;
    const std::size_t block = pg.size() / bins;

    SupNormEstimate est;
    est.degree = degree;
    est.partition_exponent = jn;
    est.dimension = static_cast<std::size_t>(r1) * bins;
    est.kappa = kappa;

    // per-interval discrete least squares in an orthonormalized polynomial basis
    const std::size_t dim = static_cast<std::size_t>(degree) + 1;
    std::vector<std::vector<double>> basis(dim, std::vector<double>(block));
    for (std::size_t d = 0; d < dim; ++d)
        for (std::size_t i = 0; i < block; ++i)
            basis[d][i] = std::pow(2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(block) - 1.0,
                                   static_cast<double>(d));
    for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t e = 0; e < d; ++e) {
            double dot = 0.0;
            for (std::size_t i = 0; i < block; ++i) dot += basis[d][i] * basis[e][i];
            for (std::size_t i = 0; i < block; ++i) basis[d][i] -= dot * basis[e][i];
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < block; ++i) nrm += basis[d][i] * basis[d][i];
        nrm = std::sqrt(nrm);
        if (nrm < 1e-14) throw std::invalid_argument("sup_norm_estimate: degenerate polynomial basis");
        for (std::size_t i = 0; i < block; ++i) basis[d][i] /= nrm;
    }

    double sup = 0.0;
    std::vector<double> fitted(block);
    for (std::size_t b = 0; b < bins; ++b) {
        const double* x = pg.values.data() + b * block;
        std::fill(fitted.begin(), fitted.end(), 0.0);
        for (std::size_t d = 0; d < dim; ++d) {
            double dot = 0.0;
            for (std::size_t i = 0; i < block; ++i) dot += x[i] * basis[d][i];
            for (std::size_t i = 0; i < block; ++i) fitted[i] += dot * basis[d][i];
        }
        for (std::size_t i = 0; i < block; ++i) sup = std::max(sup, std::abs(fitted[i]));
    }
    est.value = sup;
    return est;
}

/**
 * Data-driven threshold
 *   xi-hat_{j,n} = 2 [ 2 ||fhat_n||_inf ( sqrt(d/(1-b)^2 ln n / n)
 *                    + 2^{j/2} ||psi||_inf d/(1-b)^2 ln n / n ) + sqrt(ln n / n) ].
 * Requires b in [3/4, 1); delta = 6 is the theoretically prescribed value.
 */
inline double data_threshold(int j, std::size_t n, const SupNormEstimate& est,
                             double delta, double b_const, double psi_sup) {
    if (n < 2) throw std::invalid_argument("data_threshold: need n >= 2");
    if (!(b_const >= 0.75 && b_const < 1.0))
        throw std::invalid_argument("data_threshold: b must lie in [3/4, 1)");
    const double ln_n = std::log(static_cast<double>(n));
    const double factor = delta / ((1.0 - b_const) * (1.0 - b_const)) * ln_n / static_cast<double>(n);
    return 2.0 * (2.0 * est.value * (std::sqrt(factor) + std::pow(2.0, 0.5 * j) * psi_sup * factor)
                  + std::sqrt(ln_n / static_cast<double>(n)));
}

enum class ThresholdMode { oracle, data_driven };

inline std::string to_string(ThresholdMode m) {
    return m == ThresholdMode::oracle ? "oracle" : "data_driven";
}

/**
 * Per-level thresholds together with the constants that produced them.
 * Thresholds are nondecreasing in j for fixed n.
 */
struct ThresholdPlan {
    ThresholdMode mode = ThresholdMode::oracle;
    double delta = 6.0;
    std::optional<double> b_const; // data-driven mode
    std::optional<double> c_star;  // oracle mode
    double f_sup = 0.0;            // ||f||_inf or ||fhat_n||_inf
    std::map<int, double> per_level;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["mode"] = to_string(mode);
        j["delta"] = delta;
        j["b"] = b_const ? nlohmann::ordered_json(*b_const) : nlohmann::ordered_json(nullptr);
        j["f_sup"] = f_sup;
        j["c_star"] = c_star ? nlohmann::ordered_json(*c_star) : nlohmann::ordered_json(nullptr);
        nlohmann::ordered_json levels;
        for (const auto& [level, xi] : per_level) levels[std::to_string(level)] = xi;
        j["per_level"] = levels;
        return j;
    }
};

inline ThresholdPlan oracle_plan(int j0, int j1, std::size_t n, double f_sup, double c_star,
                                 double delta, double psi_sup) {
    ThresholdPlan plan;
    plan.mode = ThresholdMode::oracle;
    plan.delta = delta;
    plan.c_star = c_star;
    plan.f_sup = f_sup;
    for (int j = j0; j < j1; ++j)
        plan.per_level[j] = oracle_threshold(j, n, f_sup, c_star, delta, psi_sup);
    return plan;
}

inline ThresholdPlan data_plan(int j0, int j1, std::size_t n, const SupNormEstimate& est,
                               double delta, double b_const, double psi_sup) {
    ThresholdPlan plan;
    plan.mode = ThresholdMode::data_driven;
    plan.delta = delta;
    plan.b_const = b_const;
    plan.f_sup = est.value;
    for (int j = j0; j < j1; ++j)
        plan.per_level[j] = data_threshold(j, n, est, delta, b_const, psi_sup);
    return plan;
}

/// Zero thresholds on every level: hard thresholding becomes the identity,
/// which is the linear estimator's coefficient rule.
inline ThresholdPlan zero_plan(int j0, int j1) {
    ThresholdPlan plan;
    plan.mode = ThresholdMode::oracle;
    plan.delta = 0.0;
    plan.c_star = 0.0;
    plan.f_sup = 0.0;
    for (int j = j0; j < j1; ++j) plan.per_level[j] = 0.0;
    return plan;
}

/**
 * Applies the hard rule level by level: scaling coefficients pass unchanged,
 * detail b_{j,k} becomes hard_threshold(b_{j,k}, plan.per_level[j]). The plan
 * must cover every detail level of the input.
 */
inline WaveletCoefficients apply_threshold(const WaveletCoefficients& coeffs, const ThresholdPlan& plan) {
    WaveletCoefficients out = coeffs;
    for (int j = out.j0; j < out.j1; ++j) {
        const auto it = plan.per_level.find(j);
        if (it == plan.per_level.end())
            throw std::invalid_argument("apply_threshold: plan missing level " + std::to_string(j));
        const double xi = it->second;
        for (double& b : out.detail(j)) b = hard_threshold(b, xi);
    }
    return out;
}

} // namespace wavespec
