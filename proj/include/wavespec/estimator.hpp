#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "wavespec/arma_process.hpp"
#include "wavespec/covariance.hpp"
#include "wavespec/grid_function.hpp"
#include "wavespec/info_projection.hpp"
#include "wavespec/metrics.hpp"
#include "wavespec/periodogram.hpp"
#include "wavespec/rng.hpp"
#include "wavespec/thresholding.hpp"
#include "wavespec/wavelet_basis.hpp"

namespace wavespec {

enum class EstimatorKind { linear, hard_oracle, hard_adaptive, baseline_histogram };

inline std::string to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::linear: return "linear";
        case EstimatorKind::hard_oracle: return "hard_oracle";
        case EstimatorKind::hard_adaptive: return "hard_adaptive";
        default: return "baseline_histogram";
    }
}

inline EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "linear") return EstimatorKind::linear;
    if (s == "hard_oracle") return EstimatorKind::hard_oracle;
    if (s == "hard_adaptive") return EstimatorKind::hard_adaptive;
    if (s == "baseline_histogram") return EstimatorKind::baseline_histogram;
    throw std::invalid_argument("unknown estimator: " + s);
}

struct ThresholdOptions {
    double delta = 6.0;
    double b_const = 0.841;
    double kappa = 1.0 / 36.0;
    int degree = 0;    // r of the piecewise-polynomial sup-norm pre-estimator
    double eta = 1e-4; // clip level for the log initialization
};

struct RunConfig {
    std::optional<ArmaNoiseParams> model; // simulate when set
    std::string input_csv;                // external series otherwise
    std::size_t n = 1024;
    std::uint64_t seed = 1;
    EstimatorKind estimator = EstimatorKind::hard_adaptive;
    std::optional<int> grid_exponent;     // default: max(ceil(log2 n), j1 + 4)
    double linear_smoothness = 1.0;       // s for the linear scale rule
    std::string filter = "symmlet8";
    ThresholdOptions thresholds;
    SolverOptions solver;
    std::size_t histogram_max_dim = 100;
    std::size_t covariance_order = 128;   // m of the Bochner check
    std::string out_dir;                  // artifacts written when nonempty

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        if (model) {
            j["model"] = {{"ar", model->ar},
                          {"ma", model->ma},
                          {"c0", model->noise_scale},
                          {"innovation_variance", model->innovation_variance}};
        } else {
            j["input_csv"] = input_csv;
        }
        j["n"] = n;
        j["seed"] = seed;
        j["estimator"] = to_string(estimator);
        j["grid_exponent"] = grid_exponent ? nlohmann::ordered_json(*grid_exponent)
                                           : nlohmann::ordered_json(nullptr);
        j["linear_smoothness"] = linear_smoothness;
        j["filter"] = filter;
        j["delta"] = thresholds.delta;
        j["b"] = thresholds.b_const;
        j["kappa"] = thresholds.kappa;
        j["r"] = thresholds.degree;
        j["eta"] = thresholds.eta;
        j["tol"] = solver.tol;
        j["max_iters"] = solver.max_iters;
        j["histogram_max_dim"] = histogram_max_dim;
        j["covariance_order"] = covariance_order;
        return j;
    }
};

/// Full record of one estimation run; to_json() is the serialized report.
struct RunReport {
    RunConfig config;
    ScaleLevels levels;
    int grid_exponent = 0;
    GridFunction periodogram_fn;
    GridFunction unconstrained;
    GridFunction estimate;
    std::optional<ThresholdPlan> plan;
    std::optional<SupNormEstimate> sup_estimate;
    ProjectionReport projection;
    std::optional<double> kl_to_truth;
    std::optional<double> l2_to_truth;
    double log_besov_norm = 0.0; // of log estimate, s=1, p=q=2, levels j0..j1
    double d_j0 = 0.0;           // estimate distance to its coarse-scale projection
    double gamma_j0 = 0.0;
    double min_eigenvalue_estimate = 0.0;
    double min_eigenvalue_unconstrained = 0.0;
    double estimate_min = 0.0;
    double timing_ms = 0.0;
    int exit_code = 0;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["config"] = config.to_json();
        j["j0"] = levels.j0;
        j["j1"] = levels.j1;
        j["grid_exponent"] = grid_exponent;
        j["threshold_plan"] = plan ? plan->to_json() : nlohmann::ordered_json(nullptr);
        if (sup_estimate) {
            j["sup_norm_estimate"] = {{"value", sup_estimate->value},
                                      {"r", sup_estimate->degree},
                                      {"J_n", sup_estimate->partition_exponent},
                                      {"N_n", sup_estimate->dimension},
                                      {"kappa", sup_estimate->kappa}};
            // The guarantee behind the data-driven threshold assumes the
            // pre-estimator bias stays below a quarter of the sup norm,
            // which cannot be checked from data; surfaced, not enforced.
            j["assumptions"] = {{"pre_estimator_bias_within_quarter_sup", "assumed"}};
        } else {
            j["sup_norm_estimate"] = nullptr;
        }
        j["projection"] = projection.to_json();
        nlohmann::ordered_json metrics;
        metrics["kl"] = kl_to_truth ? nlohmann::ordered_json(*kl_to_truth) : nlohmann::ordered_json(nullptr);
        metrics["l2"] = l2_to_truth ? nlohmann::ordered_json(*l2_to_truth) : nlohmann::ordered_json(nullptr);
        metrics["besov"] = {{"s", 1.0}, {"p", 2.0}, {"q", 2.0},
                            {"value", log_besov_norm},
                            {"truncated_at", levels.j1}};
        metrics["d_j"] = d_j0;
        metrics["gamma_j"] = gamma_j0;
        metrics["estimate_min"] = estimate_min;
        j["metrics"] = metrics;
        j["covariance_check"] = {{"order", config.covariance_order},
                                 {"min_eigenvalue_estimate", min_eigenvalue_estimate},
                                 {"min_eigenvalue_unconstrained", min_eigenvalue_unconstrained},
                                 {"positive_definite", min_eigenvalue_estimate >= -1e-8}};
        j["exit_code"] = exit_code;
        if (!config.out_dir.empty())
            j["artifacts"] = {"periodogram.csv", "unconstrained.csv", "estimate.csv", "report.json"};
        j["timing_ms"] = timing_ms;
        return j;
    }
};

/// Runs fn(i) for i in [0, count) on a small worker pool. Each index writes
/// only its own output slot, so results do not depend on scheduling.
template <typename F>
inline void parallel_for(std::size_t count, F&& fn) {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

namespace detail {

/// Covariance lag cap when summing the bias constants C1, C2.
inline constexpr std::size_t kBiasLagCap = 2048;

inline double model_bias_constant(const ArmaNoiseParams& model) {
    const auto rho = true_covariance(model, kBiasLagCap);
    return bias_constant(rho);
}

} // namespace detail

/// Least-squares projection of a sampled function onto m equal histogram bins.
inline GridFunction histogram_project(const GridFunction& g, std::size_t m) {
    if (m == 0 || m > g.size())
        throw std::invalid_argument("histogram_project: dimension must lie in [1, grid size]");
    std::vector<double> sum(m, 0.0);
    std::vector<std::size_t> cnt(m, 0);
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t bin = i * m / n;
        sum[bin] += g.values[i];
        ++cnt[bin];
    }
    GridFunction out(g.grid_exponent);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t bin = i * m / n;
        out.values[i] = sum[bin] / static_cast<double>(cnt[bin]);
    }
    return out;
}

struct HistogramRow {
    std::size_t dim = 0;
    double l2_error = 0.0;
};

/// Oracle sweep over histogram dimensions: the best m is chosen by the true
/// L2 error, standing in for the penalized model selection of the reference
/// method.
struct HistogramSweep {
    std::vector<HistogramRow> rows;
    std::size_t best_dim = 0;
    double best_error = 0.0;
    GridFunction best;
};

inline HistogramSweep histogram_baseline(const GridFunction& pg, const std::vector<std::size_t>& dims,
                                         const GridFunction& truth) {
    if (dims.empty()) throw std::invalid_argument("histogram_baseline: no dimensions given");
    HistogramSweep sweep;
    for (std::size_t m : dims) {
        GridFunction proj = histogram_project(pg, m);
        const double err = l2_distance(proj, truth);
        sweep.rows.push_back({m, err});
        if (sweep.best_dim == 0 || err < sweep.best_error) {
            sweep.best_dim = m;
            sweep.best_error = err;
            sweep.best = std::move(proj);
        }
    }
    return sweep;
}

/**
 * End-to-end estimation: series -> periodogram -> wavelet coefficients ->
 * threshold plan -> unconstrained expansion -> log initialization ->
 * information projection -> metrics and Bochner check. Artifacts
 * (periodogram.csv, unconstrained.csv, estimate.csv, report.json) are written
 * when the config names an output directory.
 *
 * Exit code 0 on success, 2 when the projection fails to converge.
 */
inline RunReport run_estimate(const RunConfig& config, const WaveletBasis* shared_basis = nullptr) {
    const auto t_start = std::chrono::steady_clock::now();
    if (config.estimator == EstimatorKind::baseline_histogram)
        throw std::invalid_argument("run_estimate: histogram baseline runs through histogram_baseline");
    if (config.estimator == EstimatorKind::hard_oracle && !config.model)
        throw std::invalid_argument("run_estimate: the oracle threshold needs a known model");

    RunReport report;
    report.config = config;

    TimeSeries series = config.model ? simulate(*config.model, config.n, config.seed)
                                     : read_series_csv(config.input_csv);
    const std::size_t n = series.size();
    report.config.n = n;

    report.levels = config.estimator == EstimatorKind::linear
                        ? linear_scale_levels(n, config.linear_smoothness)
                        : adaptive_scale_levels(n);
    const int grid_j = config.grid_exponent ? *config.grid_exponent
                                            : default_grid_exponent(n, report.levels.j1);
    report.grid_exponent = grid_j;
    if (report.levels.j1 > grid_j)
        throw std::invalid_argument("run_estimate: grid exponent below the fine analysis level");

    std::optional<WaveletBasis> owned_basis;
    const bool can_share = shared_basis && shared_basis->grid_exponent() == grid_j &&
                           shared_basis->filter_name() == config.filter;
    if (!can_share) owned_basis.emplace(build_basis(config.filter, grid_j));
    const WaveletBasis& basis = can_share ? *shared_basis : *owned_basis;

    report.periodogram_fn = periodogram(series, grid_j);
    WaveletCoefficients coeffs = basis.analyze(report.periodogram_fn, report.levels.j0, report.levels.j1);

    std::optional<GridFunction> truth;
    if (config.model) truth = true_spectral_density(*config.model, grid_j);

    switch (config.estimator) {
        case EstimatorKind::linear:
            report.plan = std::nullopt; // raw coefficients, no thresholding
            break;
        case EstimatorKind::hard_oracle: {
            const double f_sup = max_value(*truth);
            const double c_star = detail::model_bias_constant(*config.model);
            report.plan = oracle_plan(report.levels.j0, report.levels.j1, n, f_sup, c_star,
                                      config.thresholds.delta, basis.psi_sup());
            break;
        }
        case EstimatorKind::hard_adaptive: {
            report.sup_estimate = sup_norm_estimate(report.periodogram_fn, n,
                                                    config.thresholds.degree, config.thresholds.kappa);
            report.plan = data_plan(report.levels.j0, report.levels.j1, n, *report.sup_estimate,
                                    config.thresholds.delta, config.thresholds.b_const, basis.psi_sup());
            break;
        }
        default:
            break;
    }

    const WaveletCoefficients thresholded = report.plan ? apply_threshold(coeffs, *report.plan) : coeffs;
    report.unconstrained = basis.synthesize(thresholded);

    const ExpFamilyParams theta0 = init_theta(report.unconstrained, config.thresholds.eta,
                                              report.levels.j0, report.levels.j1, basis);
    const std::vector<double> targets = thresholded.to_lambda_vector();
    report.projection = project(targets, theta0, basis, config.solver);
    report.estimate = eval_family(report.projection.theta_hat, basis);
    report.estimate_min = min_value(report.estimate);

    if (truth) {
        report.kl_to_truth = kl_divergence(*truth, report.estimate);
        report.l2_to_truth = l2_distance(*truth, report.estimate);
    }
    report.log_besov_norm = besov_norm(report.projection.theta_hat.as_coefficients(), BesovSpec(1.0, 2.0, 2.0));
    const ApproxDiagnostics diag = approx_diagnostics(report.estimate, report.levels.j0, basis);
    report.d_j0 = diag.d_j;
    report.gamma_j0 = diag.gamma_j;

    const std::size_t max_lag = std::min<std::size_t>(config.covariance_order, report.estimate.size() / 2 - 1);
    const auto cov_est = spectral_to_covariance(report.estimate, max_lag, CovarianceSource::nonlinear_estimate);
    const auto cov_raw = spectral_to_covariance(report.unconstrained, max_lag, CovarianceSource::linear_estimate);
    const std::size_t order = std::min<std::size_t>(config.covariance_order, max_lag + 1);
    report.min_eigenvalue_estimate = min_toeplitz_eigenvalue(cov_est, order);
    report.min_eigenvalue_unconstrained = min_toeplitz_eigenvalue(cov_raw, order);

    report.exit_code = report.projection.converged ? 0 : 2;
    report.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();

    if (!config.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(config.out_dir);
        write_csv(report.periodogram_fn, (fs::path(config.out_dir) / "periodogram.csv").string());
        write_csv(report.unconstrained, (fs::path(config.out_dir) / "unconstrained.csv").string());
        write_csv(report.estimate, (fs::path(config.out_dir) / "estimate.csv").string());
        std::ofstream out(fs::path(config.out_dir) / "report.json");
        out << report.to_json().dump(2) << '\n';
    }
    return report;
}

// ---------------------------------------------------------------------------
// Monte Carlo studies
// ---------------------------------------------------------------------------

struct DeviationRow {
    double x = 0.0;
    double empirical = 0.0;   // exceedance frequency
    double bound = 0.0;       // 2 e^{-x}
    std::size_t exceedances = 0;
    std::size_t reps = 0;
};

/**
 * Empirical check of the coefficient deviation inequality: for a fixed
 * detail coefficient (j, k), estimates over independent replications the
 * frequency of |bhat - b| exceeding
 *   2 ||f||_inf (sqrt(x/n) + 2^{j/2} ||psi||_inf x/n) + C_star / sqrt(n)
 * and reports it against the bound 2 e^{-x}.
 */
inline std::vector<DeviationRow> deviation_study(const ArmaNoiseParams& model, std::size_t n,
                                                 const std::vector<double>& x_values, std::size_t reps,
                                                 std::uint64_t root_seed, const WaveletBasis& basis,
                                                 int j, int k) {
    const GridFunction truth = true_spectral_density(model, basis.grid_exponent());
    const double f_sup = max_value(truth);
    const double c_star = detail::model_bias_constant(model);
    const double psi_sup = basis.psi_sup();

    const GridFunction psi_jk = basis.wavelet_function(j, k);
    const std::size_t grid = psi_jk.size();
    double b_true = 0.0;
    for (std::size_t i = 0; i < grid; ++i) b_true += truth.values[i] * psi_jk.values[i];
    b_true /= static_cast<double>(grid);

    std::vector<double> deviations(reps);
    parallel_for(reps, [&](std::size_t rep) {
        const TimeSeries ts = simulate(model, n, split_seed(root_seed, rep));
        const GridFunction pg = periodogram(ts, basis.grid_exponent());
        double bhat = 0.0;
        for (std::size_t i = 0; i < grid; ++i) bhat += pg.values[i] * psi_jk.values[i];
        bhat /= static_cast<double>(grid);
        deviations[rep] = std::abs(bhat - b_true);
    });

    std::vector<DeviationRow> rows;
    for (double x : x_values) {
        const double xi = 2.0 * f_sup * (std::sqrt(x / static_cast<double>(n)) +
                                         std::pow(2.0, 0.5 * j) * psi_sup * x / static_cast<double>(n)) +
                          c_star / std::sqrt(static_cast<double>(n));
        DeviationRow row;
        row.x = x;
        row.bound = 2.0 * std::exp(-x);
        row.reps = reps;
        for (double d : deviations)
            if (d > xi) ++row.exceedances;
        row.empirical = static_cast<double>(row.exceedances) / static_cast<double>(reps);
        rows.push_back(row);
    }
    return rows;
}

struct RateRow {
    std::size_t n = 0;
    double median_kl = 0.0;
    double iqr = 0.0;
    std::size_t non_converged = 0;
};

struct RateStudy {
    std::vector<RateRow> rows;
    double slope = 0.0; // log median KL on log n
};

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

/// Median KL divergence to the truth per sample size, plus the fitted
/// log-log slope. The full estimation pipeline runs for every replication.
inline RateStudy rate_study(const ArmaNoiseParams& model, EstimatorKind estimator,
                            const std::vector<std::size_t>& n_values, std::size_t reps,
                            std::uint64_t root_seed, const RunConfig& base_config = {}) {
    RateStudy study;
    std::uint64_t stream = 0;
    for (std::size_t n : n_values) {
        RunConfig config = base_config;
        config.model = model;
        config.n = n;
        config.estimator = estimator;
        config.out_dir.clear();
        config.grid_exponent.reset();

        const ScaleLevels levels = estimator == EstimatorKind::linear
                                       ? linear_scale_levels(n, config.linear_smoothness)
                                       : adaptive_scale_levels(n);
        const WaveletBasis basis = build_basis(config.filter, default_grid_exponent(n, levels.j1));

        std::vector<double> kls(reps);
        std::vector<int> failed(reps, 0);
        const std::uint64_t base_stream = stream;
        parallel_for(reps, [&](std::size_t rep) {
            RunConfig local = config;
            local.seed = split_seed(root_seed, base_stream + rep);
            const RunReport r = run_estimate(local, &basis);
            kls[rep] = r.kl_to_truth.value();
            failed[rep] = r.projection.converged ? 0 : 1;
        });
        stream += reps;

        std::sort(kls.begin(), kls.end());
        RateRow row;
        row.n = n;
        row.median_kl = quantile_sorted(kls, 0.5);
        row.iqr = quantile_sorted(kls, 0.75) - quantile_sorted(kls, 0.25);
        for (int f : failed) row.non_converged += static_cast<std::size_t>(f);
        study.rows.push_back(row);
    }

    // least-squares slope of log(median) on log(n)
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(study.rows.size());
    for (const auto& row : study.rows) {
        const double x = std::log(static_cast<double>(row.n));
        const double y = std::log(row.median_kl);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    study.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return study;
}

} // namespace wavespec
