#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wavespec/grid_function.hpp"
#include "wavespec/wavelet_basis.hpp"

namespace wavespec {

/**
 * Parameter vector of the wavelet exponential family
 *   f_theta = exp( sum_{(j,k) in Lambda_{j1}} theta_{j,k} psi_{j,k} ),
 * stored in the lambda_index(j0, j1) ordering (scaling entries first).
 * Members of the family are strictly positive by construction.
 */
struct ExpFamilyParams {
    int j0 = 0;
    int j1 = 0;
    std::vector<double> theta; // size 2^j1, Lambda ordering

    static ExpFamilyParams zero(int j0, int j1) {
        ExpFamilyParams p;
        p.j0 = j0;
        p.j1 = j1;
        p.theta.assign(std::size_t{1} << j1, 0.0);
        return p;
    }

    WaveletCoefficients as_coefficients() const {
        return WaveletCoefficients::from_lambda_vector(j0, j1, theta);
    }
};

/// Exponent beyond which exp() overflows double range; parameters reaching it
/// are treated as diverged.
inline constexpr double kLogOverflowLimit = 700.0;

/// Samples of f_theta on the basis grid. Throws on overflow of the exponent.
inline GridFunction eval_family(const ExpFamilyParams& params, const WaveletBasis& basis) {
    GridFunction u = basis.synthesize(params.as_coefficients());
    for (double v : u.values)
        if (!(std::abs(v) <= kLogOverflowLimit))
            throw std::overflow_error("eval_family: diverged parameters, exponent exceeds overflow limit");
    for (double& v : u.values) v = std::exp(v);
    return u;
}

/// <f_theta, psi_{j,k}> over Lambda_{j1}, by grid quadrature (identical to
/// the analyze transform of the sampled family member).
inline std::vector<double> coefficient_map(const ExpFamilyParams& params, const WaveletBasis& basis) {
    const GridFunction f = eval_family(params, basis);
    return basis.analyze(f, params.j0, params.j1).to_lambda_vector();
}

struct SolverOptions {
    double tol = 1e-6;             // stop when sqrt(objective) <= tol
    std::size_t max_iters = 50000; // accepted steps
    double initial_step = 0.1;
    double step_growth = 1.2;
    double step_cap = 10.0;
    double min_step = 1e-16;       // step underflow => honest non-convergence
};

/**
 * Result of an information-projection solve. converged implies
 * residual_norm <= tol; the objective trace holds the accepted values of the
 * least-squares objective and is nonincreasing.
 */
struct ProjectionReport {
    ExpFamilyParams theta_hat;
    double residual_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;

    /// Serialized form: theta as (level, k, value) triples plus the summary
    /// fields. The trace stays in memory only.
    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        nlohmann::ordered_json triples = nlohmann::ordered_json::array();
        const auto idx = lambda_index(theta_hat.j0, theta_hat.j1);
        for (std::size_t i = 0; i < idx.size(); ++i)
            triples.push_back({idx[i].first, idx[i].second, theta_hat.theta[i]});
        j["theta"] = triples;
        j["residual_norm"] = residual_norm;
        j["iterations"] = iterations;
        j["converged"] = converged;
        return j;
    }
};

namespace detail {

/// Scratch state for one objective evaluation: exponent, density, coefficient
/// residual and objective value. Returns false on exponent overflow.
struct ProjectionScratch {
    GridFunction density;
    std::vector<double> coeffs;
    std::vector<double> residual;
    double objective = 0.0;

    bool eval(const ExpFamilyParams& params, std::span<const double> targets, const WaveletBasis& basis) {
        GridFunction u = basis.synthesize(params.as_coefficients());
        for (double v : u.values)
            if (!(std::abs(v) <= kLogOverflowLimit)) return false;
        for (double& v : u.values) v = std::exp(v);
        density = std::move(u);
        coeffs = basis.analyze(density, params.j0, params.j1).to_lambda_vector();
        residual.resize(coeffs.size());
        double g = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            residual[i] = coeffs[i] - targets[i];
            g += residual[i] * residual[i];
        }
        objective = g;
        return true;
    }
};

} // namespace detail

/// Analytic gradient of G(theta) = ||coefficient_map(theta) - targets||^2.
/// With r the coefficient residual and R = sum r_{jk} psi_{jk},
/// dG/dtheta_{j'k'} = 2 <f_theta psi_{j'k'}, R> = 2 analyze(f_theta * R).
inline std::vector<double> projection_gradient(const ExpFamilyParams& params,
                                               std::span<const double> targets,
                                               const WaveletBasis& basis) {
    detail::ProjectionScratch scratch;
    if (!scratch.eval(params, targets, basis))
        throw std::overflow_error("projection_gradient: diverged parameters");
    const GridFunction rfun =
        basis.synthesize(WaveletCoefficients::from_lambda_vector(params.j0, params.j1, scratch.residual));
    GridFunction prod(basis.grid_exponent());
    for (std::size_t i = 0; i < prod.size(); ++i)
        prod.values[i] = scratch.density.values[i] * rfun.values[i];
    std::vector<double> grad = basis.analyze(prod, params.j0, params.j1).to_lambda_vector();
    for (double& g : grad) g *= 2.0;
    return grad;
}

/**
 * Solves the information-projection equations
 *   <f_theta, psi_{j,k}> = target_{j,k}  for all (j,k) in Lambda_{j1}
 * as a least-squares problem by gradient descent with an adaptive step:
 * backtracking halving on objective increase, growth on acceptance.
 *
 * Overflow during the line search rejects the step; a step below min_step
 * returns a non-converged report rather than throwing.
 */
inline ProjectionReport project(std::span<const double> targets, const ExpFamilyParams& init,
                                const WaveletBasis& basis, const SolverOptions& opts = {}) {
    if (targets.size() != (std::size_t{1} << init.j1))
        throw std::invalid_argument("project: targets must be indexed by Lambda_{j1}");
    for (double t : init.theta)
        if (!std::isfinite(t)) throw std::invalid_argument("project: init must be finite");

    ExpFamilyParams theta = init;
    detail::ProjectionScratch current;
    if (!current.eval(theta, targets, basis))
        throw std::overflow_error("project: initial parameters diverge");

    ProjectionReport report;
    report.objective_trace.push_back(current.objective);

    double step = opts.initial_step;
    const std::size_t dim = theta.theta.size();
    ExpFamilyParams trial = theta;
    detail::ProjectionScratch scratch;

    while (report.iterations < opts.max_iters) {
        if (std::sqrt(current.objective) <= opts.tol) {
            report.converged = true;
            break;
        }

        // gradient at the current point, reusing the current density
        const GridFunction rfun = basis.synthesize(
            WaveletCoefficients::from_lambda_vector(theta.j0, theta.j1, current.residual));
        GridFunction prod(basis.grid_exponent());
        for (std::size_t i = 0; i < prod.size(); ++i)
            prod.values[i] = current.density.values[i] * rfun.values[i];
        std::vector<double> grad = basis.analyze(prod, theta.j0, theta.j1).to_lambda_vector();
        for (double& g : grad) g *= 2.0;

        bool accepted = false;
        while (step >= opts.min_step) {
            for (std::size_t i = 0; i < dim; ++i)
                trial.theta[i] = theta.theta[i] - step * grad[i];
            if (scratch.eval(trial, targets, basis) && scratch.objective < current.objective) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // step underflow: report honestly

        theta.theta.swap(trial.theta);
        std::swap(current, scratch);
        step = std::min(step * opts.step_growth, opts.step_cap);
        ++report.iterations;
        report.objective_trace.push_back(current.objective);
    }

    report.converged = report.converged || std::sqrt(current.objective) <= opts.tol;
    report.theta_hat = std::move(theta);
    report.residual_norm = std::sqrt(current.objective);
    return report;
}

/**
 * Initial parameters from an unconstrained (possibly sign-violating)
 * estimate: clip at eta, take the log, expand and restrict to Lambda_{j1}.
 */
inline ExpFamilyParams init_theta(const GridFunction& unconstrained, double eta,
                                  int j0, int j1, const WaveletBasis& basis) {
    if (!(eta > 0.0)) throw std::invalid_argument("init_theta: eta must be > 0");
    GridFunction clipped = unconstrained;
    for (double& v : clipped.values) v = std::log(std::max(v, eta));
    ExpFamilyParams p;
    p.j0 = j0;
    p.j1 = j1;
    p.theta = basis.analyze(clipped, j0, j1).to_lambda_vector();
    return p;
}

} // namespace wavespec
