#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wavespec/grid_function.hpp"
#include "wavespec/info_projection.hpp"
#include "wavespec/wavelet_basis.hpp"

namespace wavespec {

/**
 * Kullback-Leibler divergence Delta(f; g) = int (f log(f/g) - f + g) by the
 * rectangle rule. Nonnegative; zero iff the inputs agree. Points with f = 0
 * contribute g (the f log f -> 0 limit convention).
 */
inline double kl_divergence(const GridFunction& f, const GridFunction& g) {
    if (f.size() != g.size()) throw std::invalid_argument("kl_divergence: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double fi = f.values[i];
        const double gi = g.values[i];
        if (!(gi > 0.0)) throw std::invalid_argument("kl_divergence: second argument must be strictly positive");
        if (fi < 0.0) throw std::invalid_argument("kl_divergence: first argument must be nonnegative");
        s += (fi > 0.0 ? fi * std::log(fi / gi) - fi + gi : gi);
    }
    return s / static_cast<double>(f.size());
}

/**
 * Besov smoothness specification. p or q equal to infinity selects the max
 * form of the corresponding sum. The restriction s + 1/2 - 1/p >= 0 keeps the
 * ball inside L2([0,1]).
 */
struct BesovSpec {
    double s;
    double p;
    double q;
    double radius;

    BesovSpec(double s_, double p_, double q_, double radius_ = 1.0)
        : s(s_), p(p_), q(q_), radius(radius_) {
        if (!(p >= 1.0) || !(q >= 1.0))
            throw std::invalid_argument("BesovSpec: p and q must lie in [1, inf]");
        if (s_star() < 0.0)
            throw std::invalid_argument("BesovSpec: need s + 1/2 - 1/p >= 0");
    }

    double s_star() const { return s + 0.5 - (std::isinf(p) ? 0.0 : 1.0 / p); }
};

namespace detail {

inline double lp_norm(const std::vector<double>& v, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s, 1.0 / p);
}

} // namespace detail

/**
 * Truncated Besov norm from the available coefficient levels:
 *   (sum_k |a_{j0,k}|^p)^{1/p} + (sum_j 2^{j s* q} (sum_k |b_{j,k}|^p)^{q/p})^{1/q},
 * sums replaced by maxima when p or q is infinite.
 */
inline double besov_norm(const WaveletCoefficients& coeffs, const BesovSpec& spec) {
    const double a_part = detail::lp_norm(coeffs.scaling, spec.p);
    const double s_star = spec.s_star();
    double b_part = 0.0;
    if (std::isinf(spec.q)) {
        for (int j = coeffs.j0; j < coeffs.j1; ++j)
            b_part = std::max(b_part, std::pow(2.0, j * s_star) * detail::lp_norm(coeffs.detail(j), spec.p));
    } else {
        for (int j = coeffs.j0; j < coeffs.j1; ++j)
            b_part += std::pow(std::pow(2.0, j * s_star) * detail::lp_norm(coeffs.detail(j), spec.p), spec.q);
        b_part = b_part > 0.0 ? std::pow(b_part, 1.0 / spec.q) : 0.0;
    }
    return a_part + b_part;
}

/**
 * Approximation diagnostics at level j: D_j and gamma_j are the L2 and sup
 * distances from g to its V_j projection; A_j is the exact extremal constant
 * with ||v||_inf <= A_j ||v||_L2 on V_j, the sup of the square root of the
 * reproducing-kernel diagonal sum_k phi_{j,k}(x)^2.
 */
struct ApproxDiagnostics {
    double d_j = 0.0;
    double gamma_j = 0.0;
    double a_j = 0.0;
};

inline ApproxDiagnostics approx_diagnostics(const GridFunction& g, int j, const WaveletBasis& basis) {
    if (j < 0 || j > basis.grid_exponent())
        throw std::invalid_argument("approx_diagnostics: level must lie in [0, J]");
    ApproxDiagnostics out;

    const GridFunction gj = basis.synthesize(basis.analyze(g, j, j));
    double d2 = 0.0, gmax = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double diff = g.values[i] - gj.values[i];
        d2 += diff * diff;
        gmax = std::max(gmax, std::abs(diff));
    }
    out.d_j = std::sqrt(d2 / static_cast<double>(g.size()));
    out.gamma_j = gmax;

    if (j == basis.grid_exponent()) {
        out.a_j = std::pow(2.0, 0.5 * j); // grid-level atoms are scaled deltas
        return out;
    }
    const auto& base = basis.scaling_base(j);
    const std::size_t n = base.size();
    const std::size_t stride = n >> j; // kernel diagonal is 2^{-j}-periodic
    double kmax = 0.0;
    for (std::size_t i = 0; i < stride; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < (std::size_t{1} << j); ++k)
            s += base[(i + k * stride) % n] * base[(i + k * stride) % n];
        kmax = std::max(kmax, s);
    }
    out.a_j = std::sqrt(kmax);
    return out;
}

/**
 * Residual of the Pythagorean-like identity
 *   Delta(f; f_theta) = Delta(f; f_{theta*}) + Delta(f_{theta*}; f_theta),
 * valid when theta* matches the Lambda coefficients of f. When that
 * precondition fails the coefficient mismatch is reported instead.
 */
struct PythagorasCheck {
    bool precondition_ok = false;
    double coefficient_mismatch = 0.0;
    double residual = std::numeric_limits<double>::quiet_NaN();
};

inline PythagorasCheck pythagoras_residual(const GridFunction& f, const ExpFamilyParams& theta_star,
                                           const ExpFamilyParams& theta, const WaveletBasis& basis,
                                           double precondition_tol = 1e-6) {
    PythagorasCheck check;
    const std::vector<double> beta = basis.analyze(f, theta_star.j0, theta_star.j1).to_lambda_vector();
    const std::vector<double> achieved = coefficient_map(theta_star, basis);
    double mismatch = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        const double d = beta[i] - achieved[i];
        mismatch += d * d;
    }
    check.coefficient_mismatch = std::sqrt(mismatch);
    if (check.coefficient_mismatch > precondition_tol) return check;

    check.precondition_ok = true;
    const GridFunction f_star = eval_family(theta_star, basis);
    const GridFunction f_theta = eval_family(theta, basis);
    const double total = kl_divergence(f, f_theta);
    const double approx = kl_divergence(f, f_star);
    const double estim = kl_divergence(f_star, f_theta);
    check.residual = std::abs(total - approx - estim);
    return check;
}

} // namespace wavespec
