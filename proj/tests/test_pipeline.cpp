#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "wavespec/estimator.hpp"

using namespace wavespec;
namespace fs = std::filesystem;

namespace {

ArmaNoiseParams two_peak_model() {
    return ArmaNoiseParams({0.2, 0.9}, {1.0, 0.0, 1.0}, 0.5);
}

} // namespace

TEST_CASE("end-to-end adaptive run") {
    RunConfig cfg;
    cfg.model = two_peak_model();
    cfg.n = 256;
    cfg.seed = 3;
    cfg.estimator = EstimatorKind::hard_adaptive;

    const RunReport report = run_estimate(cfg);
    CHECK(report.levels.j0 == 3);
    CHECK(report.levels.j1 == 6);
    CHECK(report.projection.converged);
    CHECK(report.exit_code == 0);
    CHECK(report.estimate_min > 0.0);
    CHECK(report.projection.residual_norm <= cfg.solver.tol);
    CHECK(report.kl_to_truth.has_value());
    CHECK(*report.kl_to_truth >= 0.0);
    REQUIRE(report.plan.has_value());
    CHECK(report.plan->mode == ThresholdMode::data_driven);
    REQUIRE(report.sup_estimate.has_value());
    CHECK(report.sup_estimate->value > 0.0);
}

TEST_CASE("linear estimator configuration passthrough") {
    RunConfig cfg;
    cfg.model = two_peak_model();
    cfg.n = 1024;
    cfg.seed = 5;
    cfg.estimator = EstimatorKind::linear;
    cfg.linear_smoothness = 1.0;

    const RunReport report = run_estimate(cfg);
    CHECK(report.levels.j0 == 0);
    CHECK(std::pow(2.0, report.levels.j1) <= std::pow(1024.0, 1.0 / 3.0) + 1e-9);
    CHECK(report.levels.j1 == 3);
    CHECK_FALSE(report.plan.has_value());
    CHECK(report.estimate_min > 0.0);
}

TEST_CASE("unreachable tolerance yields exit code 2 with artifacts intact") {
    RunConfig cfg;
    cfg.model = two_peak_model();
    cfg.n = 256;
    cfg.seed = 2;
    cfg.estimator = EstimatorKind::hard_adaptive;
    cfg.solver.tol = 1e-30;
    cfg.solver.max_iters = 3;
    const RunReport r = run_estimate(cfg);
    CHECK_FALSE(r.projection.converged);
    CHECK(r.exit_code == 2);
    CHECK(r.estimate.size() == (std::size_t{1} << r.grid_exponent));
}

TEST_CASE("haar filter runs end to end") {
    RunConfig cfg;
    cfg.model = two_peak_model();
    cfg.n = 256;
    cfg.seed = 6;
    cfg.estimator = EstimatorKind::hard_adaptive;
    cfg.filter = "haar";
    const RunReport r = run_estimate(cfg);
    CHECK(r.projection.converged);
    CHECK(r.estimate_min > 0.0);
    CHECK(r.min_eigenvalue_estimate >= -1e-8);
}

TEST_CASE("oracle estimator needs a model") {
    RunConfig cfg;
    cfg.input_csv = "does_not_matter.csv";
    cfg.estimator = EstimatorKind::hard_oracle;
    CHECK_THROWS_AS(run_estimate(cfg), std::invalid_argument);
}

TEST_CASE("artifacts and reproducibility") {
    const auto dir1 = fs::temp_directory_path() / "wavespec_run_a";
    const auto dir2 = fs::temp_directory_path() / "wavespec_run_b";
    fs::remove_all(dir1);
    fs::remove_all(dir2);

    RunConfig cfg;
    cfg.model = two_peak_model();
    cfg.n = 256;
    cfg.seed = 11;
    cfg.estimator = EstimatorKind::hard_adaptive;
    cfg.out_dir = dir1.string();
    const RunReport first = run_estimate(cfg);
    cfg.out_dir = dir2.string();
    const RunReport second = run_estimate(cfg);

    for (const char* name : {"periodogram.csv", "unconstrained.csv", "estimate.csv", "report.json"}) {
        CHECK(fs::exists(dir1 / name));
        CHECK(fs::exists(dir2 / name));
    }

    auto stripped = [](const RunReport& r) {
        auto j = r.to_json();
        j.erase("timing_ms");
        return j.dump();
    };
    CHECK(stripped(first) == stripped(second));

    // csv artifacts are byte-identical
    for (const char* name : {"periodogram.csv", "estimate.csv"}) {
        std::ifstream a(dir1 / name), b(dir2 / name);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("two-peak model estimate is positive with two interior maxima") {
    RunConfig cfg;
    cfg.model = two_peak_model();
    cfg.n = 1024;
    cfg.seed = 1;
    cfg.estimator = EstimatorKind::hard_adaptive;
    const RunReport r = run_estimate(cfg);
    CHECK(r.estimate_min > 0.0);
    int interior_maxima = 0;
    const auto& g = r.estimate;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        if (g.omega(i) < 0.1 || g.omega(i) > 0.9) continue;
        if (g.values[i] > g.values[i - 1] && g.values[i] > g.values[i + 1]) ++interior_maxima;
    }
    CHECK(interior_maxima >= 2);
}

TEST_CASE("white noise estimates are nearly flat") {
    const ArmaNoiseParams white({}, {1.0}, 0.0);
    std::vector<double> ratios;
    for (std::uint64_t seed = 1; seed <= 9; ++seed) {
        RunConfig cfg;
        cfg.model = white;
        cfg.n = 4096;
        cfg.seed = seed;
        cfg.estimator = EstimatorKind::hard_adaptive;
        const RunReport r = run_estimate(cfg);
        ratios.push_back(max_value(r.estimate) / min_value(r.estimate));
    }
    std::sort(ratios.begin(), ratios.end());
    CHECK(ratios[ratios.size() / 2] <= 1.5);
}

TEST_CASE("histogram projection") {
    GridFunction pg(8, 0.7);
    for (std::size_t m : {1u, 5u, 32u}) {
        const GridFunction h = histogram_project(pg, m);
        for (double v : h.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
    }

    GaussianStream gs(2);
    GridFunction noisy(8);
    for (auto& v : noisy.values) v = gs.next();
    const GridFunction identity = histogram_project(noisy, noisy.size());
    for (std::size_t i = 0; i < noisy.size(); ++i) CHECK(identity.values[i] == noisy.values[i]);

    CHECK_THROWS_AS(histogram_project(noisy, 0), std::invalid_argument);
    CHECK_THROWS_AS(histogram_project(noisy, noisy.size() + 1), std::invalid_argument);
}

TEST_CASE("histogram sweep picks the best dimension by true error") {
    const auto model = two_peak_model();
    const GridFunction truth = true_spectral_density(model, 10);
    const TimeSeries ts = simulate(model, 512, 4);
    const GridFunction pg = periodogram(ts, 10);
    std::vector<std::size_t> dims;
    for (std::size_t m = 1; m <= 60; ++m) dims.push_back(m);
    const HistogramSweep sweep = histogram_baseline(pg, dims, truth);
    REQUIRE(sweep.rows.size() == 60);
    double best = 1e300;
    for (const auto& row : sweep.rows) best = std::min(best, row.l2_error);
    CHECK(sweep.best_error == best);
    CHECK(sweep.best_dim >= 1);
    CHECK(l2_distance(sweep.best, truth) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("deviation study basics") {
    const auto model = two_peak_model();
    const WaveletBasis basis = build_basis("symmlet8", 9);
    const auto rows = deviation_study(model, 128, {0.0, 1.0, 2.0}, 60, 17, basis, 3, 0);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].bound == doctest::Approx(2.0));
    CHECK(rows[0].empirical <= 1.0);
    // exceedance frequency is nonincreasing in x
    CHECK(rows[1].empirical <= rows[0].empirical + 1e-12);
    CHECK(rows[2].empirical <= rows[1].empirical + 1e-12);
}

TEST_CASE("grid csv round trip") {
    const GridFunction f = true_spectral_density(two_peak_model(), 8);
    const auto path = fs::temp_directory_path() / "wavespec_grid_test.csv";
    write_csv(f, path.string());
    const GridFunction back = read_grid_csv(path.string());
    REQUIRE(back.grid_exponent == 8);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(f.values[i]).epsilon(1e-15));
    fs::remove(path);
}

TEST_CASE("rate study is deterministic for a fixed root seed") {
    const auto model = two_peak_model();
    const auto a = rate_study(model, EstimatorKind::hard_oracle, {256}, 4, 99);
    const auto b = rate_study(model, EstimatorKind::hard_oracle, {256}, 4, 99);
    REQUIRE(a.rows.size() == 1);
    CHECK(a.rows[0].median_kl == b.rows[0].median_kl);
    CHECK(a.rows[0].iqr == b.rows[0].iqr);
    CHECK(a.rows[0].iqr >= 0.0);
}
