// Command-line front end: simulation, end-to-end estimation runs, Monte
// Carlo studies and the histogram comparison. Emits CSV tables plus a JSON
// report per run; --gnuplot additionally writes a plotting script.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wavespec/estimator.hpp"

namespace fs = std::filesystem;
using namespace wavespec;

namespace {

struct ModelFlags {
    std::vector<double> ar{0.2, 0.9};
    std::vector<double> ma{1.0, 0.0, 1.0};
    double c0 = 0.5;
    double innovation_variance = 1.0;

    ArmaNoiseParams build() const { return ArmaNoiseParams(ar, ma, c0, innovation_variance); }
};

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
    cmd->add_option("--ar", m.ar, "AR coefficients a_1..a_p")->delimiter(',');
    cmd->add_option("--ma", m.ma, "MA coefficients b_0..b_q")->delimiter(',');
    cmd->add_option("--c0", m.c0, "white noise scale c_0");
    cmd->add_option("--innovation-variance", m.innovation_variance, "driving innovation variance");
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    if (j.contains("model")) {
        const auto& m = j.at("model");
        cfg.model = ArmaNoiseParams(m.at("ar").get<std::vector<double>>(),
                                    m.at("ma").get<std::vector<double>>(),
                                    m.value("c0", 0.0), m.value("innovation_variance", 1.0));
    }
    if (j.contains("input_csv")) cfg.input_csv = j.at("input_csv").get<std::string>();
    cfg.n = j.value("n", cfg.n);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("estimator")) cfg.estimator = estimator_from_string(j.at("estimator").get<std::string>());
    if (j.contains("grid_exponent") && !j.at("grid_exponent").is_null())
        cfg.grid_exponent = j.at("grid_exponent").get<int>();
    cfg.linear_smoothness = j.value("linear_smoothness", cfg.linear_smoothness);
    cfg.filter = j.value("filter", cfg.filter);
    cfg.thresholds.delta = j.value("delta", cfg.thresholds.delta);
    cfg.thresholds.b_const = j.value("b", cfg.thresholds.b_const);
    cfg.thresholds.kappa = j.value("kappa", cfg.thresholds.kappa);
    cfg.thresholds.degree = j.value("r", cfg.thresholds.degree);
    cfg.thresholds.eta = j.value("eta", cfg.thresholds.eta);
    cfg.solver.tol = j.value("tol", cfg.solver.tol);
    cfg.solver.max_iters = j.value("max_iters", cfg.solver.max_iters);
    cfg.histogram_max_dim = j.value("histogram_max_dim", cfg.histogram_max_dim);
    cfg.covariance_order = j.value("covariance_order", cfg.covariance_order);
    return cfg;
}

void write_gnuplot_estimate(const fs::path& dir) {
    std::ofstream gp(dir / "plot.gp");
    gp << "set datafile separator ','\n"
       << "set xlabel 'omega'\n"
       << "set ylabel 'spectral density'\n"
       << "set key top right\n"
       << "plot 'periodogram.csv' skip 1 using 1:2 with dots title 'periodogram', \\\n"
       << "     'unconstrained.csv' skip 1 using 1:2 with lines title 'thresholded expansion', \\\n"
       << "     'estimate.csv' skip 1 using 1:2 with lines lw 2 title 'positive estimate'";
    if (fs::exists(dir / "true_density.csv"))
        gp << ", \\\n     'true_density.csv' skip 1 using 1:2 with lines dt 2 title 'truth'";
    gp << '\n';
}

int run_estimate_cmd(const RunConfig& cfg, bool gnuplot) {
    if (cfg.estimator == EstimatorKind::baseline_histogram) {
        if (!cfg.model) {
            std::cerr << "the histogram baseline needs a known model for its oracle sweep\n";
            return 1;
        }
        TimeSeries ts = simulate(*cfg.model, cfg.n, cfg.seed);
        const ScaleLevels levels = adaptive_scale_levels(cfg.n);
        const int grid_j = cfg.grid_exponent ? *cfg.grid_exponent : default_grid_exponent(cfg.n, levels.j1);
        const GridFunction pg = periodogram(ts, grid_j);
        const GridFunction truth = true_spectral_density(*cfg.model, grid_j);
        std::vector<std::size_t> dims;
        for (std::size_t m = 1; m <= cfg.histogram_max_dim; ++m) dims.push_back(m);
        const HistogramSweep sweep = histogram_baseline(pg, dims, truth);
        if (!cfg.out_dir.empty()) {
            fs::create_directories(cfg.out_dir);
            std::ofstream out(fs::path(cfg.out_dir) / "histogram_sweep.csv");
            out << "dim,l2_error\n";
            out.precision(17);
            for (const auto& row : sweep.rows) out << row.dim << ',' << row.l2_error << '\n';
            write_csv(sweep.best, (fs::path(cfg.out_dir) / "estimate.csv").string());
        }
        std::printf("oracle-best histogram dimension m=%zu, l2 error %.6f\n", sweep.best_dim, sweep.best_error);
        return 0;
    }

    const RunReport report = run_estimate(cfg);
    if (!cfg.out_dir.empty() && cfg.model) {
        const GridFunction truth = true_spectral_density(*cfg.model, report.grid_exponent);
        write_csv(truth, (fs::path(cfg.out_dir) / "true_density.csv").string());
    }
    if (gnuplot && !cfg.out_dir.empty()) write_gnuplot_estimate(cfg.out_dir);

    std::printf("j0=%d j1=%d grid=2^%d  projection: %s after %zu iterations (residual %.3e)\n",
                report.levels.j0, report.levels.j1, report.grid_exponent,
                report.projection.converged ? "converged" : "NOT converged",
                report.projection.iterations, report.projection.residual_norm);
    if (report.kl_to_truth)
        std::printf("kl=%.6f l2=%.6f\n", *report.kl_to_truth, *report.l2_to_truth);
    std::printf("estimate min=%.6g, covariance min eigenvalue (m=%zu): %.3e\n",
                report.estimate_min, report.config.covariance_order, report.min_eigenvalue_estimate);
    if (!report.projection.converged)
        std::fprintf(stderr, "projection did not reach tolerance; artifacts were still written\n");
    return report.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positive spectral density estimation by wavelet thresholding and information projection"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "simulate the ARMA-plus-noise model and write a series CSV");
    ModelFlags sim_model;
    std::size_t sim_n = 1024;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "series.csv";
    std::string sim_density_out;
    int sim_grid_j = 12;
    add_model_flags(sim, sim_model);
    sim->add_option("--n", sim_n, "sample size");
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--out", sim_out, "output series CSV (one sample per line)");
    sim->add_option("--density-out", sim_density_out, "also write the exact spectral density CSV");
    sim->add_option("--grid-j", sim_grid_j, "grid exponent for --density-out");

    // ---- estimate ----
    auto* est = app.add_subcommand("estimate", "run the full estimation pipeline");
    ModelFlags est_model;
    bool est_no_model = false;
    std::string est_input, est_config, est_out;
    std::string est_kind = "hard_adaptive";
    std::size_t est_n = 1024;
    std::uint64_t est_seed = 1;
    int est_grid_j = -1;
    double est_s = 1.0;
    ThresholdOptions est_thr;
    SolverOptions est_solver;
    std::string est_filter = "symmlet8";
    bool est_gnuplot = false;
    add_model_flags(est, est_model);
    est->add_option("--input", est_input, "single-column series CSV instead of simulation");
    est->add_option("--config", est_config, "JSON run configuration (other flags are ignored)");
    est->add_option("--n", est_n, "sample size when simulating");
    est->add_option("--seed", est_seed, "random seed");
    est->add_option("--estimator", est_kind, "linear | hard_oracle | hard_adaptive | baseline_histogram");
    est->add_option("--grid-j", est_grid_j, "analysis grid exponent (default: max(ceil(log2 n), j1+4))");
    est->add_option("--s", est_s, "smoothness s for the linear scale rule");
    est->add_option("--delta", est_thr.delta, "threshold tuning constant (theory needs >= 6)");
    est->add_option("--b", est_thr.b_const, "data-driven threshold constant b in [3/4, 1)");
    est->add_option("--kappa", est_thr.kappa, "sup-norm pre-estimator budget constant");
    est->add_option("--r", est_thr.degree, "sup-norm pre-estimator polynomial degree");
    est->add_option("--eta", est_thr.eta, "clip level for the log initialization");
    est->add_option("--tol", est_solver.tol, "projection residual tolerance");
    est->add_option("--max-iters", est_solver.max_iters, "projection iteration cap");
    est->add_option("--filter", est_filter, "wavelet filter (symmlet8 | haar)");
    est->add_option("--out", est_out, "output directory for CSV/JSON artifacts");
    est->add_flag("--gnuplot", est_gnuplot, "emit a gnuplot script referencing the CSVs");
    est->add_flag("--no-model", est_no_model, "do not assume the default model (requires --input)");

    // ---- deviation-study ----
    auto* dev = app.add_subcommand("deviation-study", "Monte Carlo check of the coefficient deviation bound");
    ModelFlags dev_model;
    std::size_t dev_n = 512, dev_reps = 2000;
    std::uint64_t dev_seed = 1;
    std::vector<double> dev_x{1.0, 2.0, 3.0};
    int dev_j = -1, dev_k = 0;
    std::string dev_out;
    add_model_flags(dev, dev_model);
    dev->add_option("--n", dev_n, "sample size per replication");
    dev->add_option("--reps", dev_reps, "number of replications");
    dev->add_option("--seed", dev_seed, "root seed");
    dev->add_option("--x", dev_x, "deviation levels x")->delimiter(',');
    dev->add_option("--j", dev_j, "detail level (default: coarse level j0)");
    dev->add_option("--k", dev_k, "detail position");
    dev->add_option("--out", dev_out, "output directory");

    // ---- rate-study ----
    auto* rate = app.add_subcommand("rate-study", "median KL divergence against sample size");
    ModelFlags rate_model;
    std::vector<std::size_t> rate_n{256, 512, 1024, 2048, 4096};
    std::size_t rate_reps = 20;
    std::uint64_t rate_seed = 1;
    std::string rate_kind = "hard_oracle";
    std::string rate_out;
    add_model_flags(rate, rate_model);
    rate->add_option("--n-values", rate_n, "sample sizes")->delimiter(',');
    rate->add_option("--reps", rate_reps, "replications per sample size");
    rate->add_option("--seed", rate_seed, "root seed");
    rate->add_option("--estimator", rate_kind, "estimator under study");
    rate->add_option("--out", rate_out, "output directory");

    // ---- compare ----
    auto* cmp = app.add_subcommand("compare", "wavelet estimate versus the oracle histogram baseline");
    ModelFlags cmp_model;
    std::size_t cmp_n = 1024, cmp_dims = 100;
    std::uint64_t cmp_seed = 1;
    std::string cmp_out;
    bool cmp_gnuplot = false;
    add_model_flags(cmp, cmp_model);
    cmp->add_option("--n", cmp_n, "sample size");
    cmp->add_option("--seed", cmp_seed, "random seed");
    cmp->add_option("--dims-max", cmp_dims, "histogram dimensions swept: 1..dims-max");
    cmp->add_option("--out", cmp_out, "output directory");
    cmp->add_flag("--gnuplot", cmp_gnuplot, "emit a gnuplot script");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const TimeSeries ts = simulate(sim_model.build(), sim_n, sim_seed);
            write_series_csv(ts, sim_out);
            if (!sim_density_out.empty())
                write_csv(true_spectral_density(sim_model.build(), sim_grid_j), sim_density_out);
            std::printf("wrote %zu samples to %s\n", ts.size(), sim_out.c_str());
            return 0;
        }

        if (est->parsed()) {
            RunConfig cfg;
            if (!est_config.empty()) {
                std::ifstream in(est_config);
                if (!in) {
                    std::cerr << "cannot open config: " << est_config << '\n';
                    return 1;
                }
                nlohmann::json j;
                in >> j;
                cfg = config_from_json(j);
            } else {
                if (!est_input.empty()) {
                    cfg.input_csv = est_input;
                } else if (est_no_model) {
                    std::cerr << "--no-model requires --input\n";
                    return 1;
                } else {
                    cfg.model = est_model.build();
                }
                cfg.n = est_n;
                cfg.seed = est_seed;
                cfg.estimator = estimator_from_string(est_kind);
                if (est_grid_j > 0) cfg.grid_exponent = est_grid_j;
                cfg.linear_smoothness = est_s;
                cfg.thresholds = est_thr;
                cfg.solver = est_solver;
                cfg.filter = est_filter;
                cfg.out_dir = est_out;
            }
            if (cfg.thresholds.delta < 6.0)
                std::fprintf(stderr, "note: delta=%g is below the theoretically supported regime (delta >= 6)\n",
                             cfg.thresholds.delta);
            if (cfg.grid_exponent && (std::size_t{1} << *cfg.grid_exponent) < cfg.n)
                std::fprintf(stderr, "note: grid 2^%d is below n=%zu; a grid of at least n points is recommended\n",
                             *cfg.grid_exponent, cfg.n);
            return run_estimate_cmd(cfg, est_gnuplot);
        }

        if (dev->parsed()) {
            const ArmaNoiseParams model = dev_model.build();
            const ScaleLevels levels = adaptive_scale_levels(dev_n);
            const int grid_j = default_grid_exponent(dev_n, levels.j1);
            const WaveletBasis basis = build_basis("symmlet8", grid_j);
            const int j = dev_j >= 0 ? dev_j : levels.j0;
            const auto rows = deviation_study(model, dev_n, dev_x, dev_reps, dev_seed, basis, j, dev_k);
            std::printf("x,empirical,bound\n");
            for (const auto& r : rows) std::printf("%g,%.6f,%.6f\n", r.x, r.empirical, r.bound);
            if (!dev_out.empty()) {
                fs::create_directories(dev_out);
                std::ofstream out(fs::path(dev_out) / "deviation.csv");
                out << "x,empirical,bound,exceedances,reps\n";
                out.precision(17);
                for (const auto& r : rows)
                    out << r.x << ',' << r.empirical << ',' << r.bound << ',' << r.exceedances << ',' << r.reps << '\n';
            }
            return 0;
        }

        if (rate->parsed()) {
            const RateStudy study = rate_study(rate_model.build(), estimator_from_string(rate_kind),
                                               rate_n, rate_reps, rate_seed);
            std::printf("n,median_kl,iqr,non_converged\n");
            for (const auto& r : study.rows)
                std::printf("%zu,%.6f,%.6f,%zu\n", r.n, r.median_kl, r.iqr, r.non_converged);
            std::printf("log-log slope: %.4f\n", study.slope);
            if (!rate_out.empty()) {
                fs::create_directories(rate_out);
                std::ofstream out(fs::path(rate_out) / "rate.csv");
                out << "n,median_kl,iqr,non_converged\n";
                out.precision(17);
                for (const auto& r : study.rows)
                    out << r.n << ',' << r.median_kl << ',' << r.iqr << ',' << r.non_converged << '\n';
                nlohmann::ordered_json j;
                j["slope"] = study.slope;
                std::ofstream js(fs::path(rate_out) / "rate.json");
                js << j.dump(2) << '\n';
            }
            return 0;
        }

        if (cmp->parsed()) {
            const ArmaNoiseParams model = cmp_model.build();
            RunConfig cfg;
            cfg.model = model;
            cfg.n = cmp_n;
            cfg.seed = cmp_seed;
            cfg.estimator = EstimatorKind::hard_adaptive;
            cfg.out_dir = cmp_out;
            const RunReport report = run_estimate(cfg);
            const GridFunction truth = true_spectral_density(model, report.grid_exponent);
            std::vector<std::size_t> dims;
            for (std::size_t m = 1; m <= cmp_dims; ++m) dims.push_back(m);
            const HistogramSweep sweep = histogram_baseline(report.periodogram_fn, dims, truth);
            std::printf("wavelet estimate: l2=%.6f; oracle histogram (m=%zu, chosen by true error): l2=%.6f\n",
                        *report.l2_to_truth, sweep.best_dim, sweep.best_error);
            if (!cmp_out.empty()) {
                fs::create_directories(cmp_out);
                std::ofstream out(fs::path(cmp_out) / "comparison.csv");
                out << "dim,l2_error\n";
                out.precision(17);
                for (const auto& row : sweep.rows) out << row.dim << ',' << row.l2_error << '\n';
                write_csv(sweep.best, (fs::path(cmp_out) / "histogram_best.csv").string());
                write_csv(truth, (fs::path(cmp_out) / "true_density.csv").string());
                nlohmann::ordered_json j;
                j["wavelet_l2"] = *report.l2_to_truth;
                j["histogram_best_dim"] = sweep.best_dim;
                j["histogram_best_l2"] = sweep.best_error;
                j["note"] = "histogram dimension chosen by oracle sweep against the true density";
                std::ofstream js(fs::path(cmp_out) / "comparison.json");
                js << j.dump(2) << '\n';
                if (cmp_gnuplot) {
                    std::ofstream gp(fs::path(cmp_out) / "plot.gp");
                    gp << "set datafile separator ','\n"
                       << "plot 'true_density.csv' skip 1 using 1:2 with lines title 'truth', \\\n"
                       << "     'estimate.csv' skip 1 using 1:2 with lines title 'wavelet estimate', \\\n"
                       << "     'histogram_best.csv' skip 1 using 1:2 with steps title 'oracle histogram'\n";
                }
            }
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
