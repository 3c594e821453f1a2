#include "doctest.h"

#include <cmath>

#include "wavespec/arma_process.hpp"
#include "wavespec/covariance.hpp"
#include "wavespec/info_projection.hpp"
#include "wavespec/rng.hpp"

using namespace wavespec;

TEST_CASE("white-noise round trip fixes the convention") {
    const ArmaNoiseParams white({}, {1.0}, 0.0);
    const GridFunction f = true_spectral_density(white, 10);
    const auto cov = spectral_to_covariance(f, 16, CovarianceSource::true_model);
    CHECK(cov.rho[0] == doctest::Approx(1.0).epsilon(1e-8));
    for (std::size_t h = 1; h < cov.rho.size(); ++h) CHECK(std::abs(cov.rho[h]) < 1e-8);
    CHECK_FALSE(cov.asymmetry_warning());
}

TEST_CASE("round trip matches the model covariance") {
    const ArmaNoiseParams model({0.2, 0.9}, {1.0, 0.0, 1.0}, 0.5);
    const auto direct = true_covariance(model, 64);
    const auto via_grid = spectral_to_covariance(true_spectral_density(model, 12), 64,
                                                 CovarianceSource::true_model);
    for (std::size_t h = 0; h <= 64; ++h)
        CHECK(via_grid.rho[h] == doctest::Approx(direct[h]).epsilon(1e-6));
}

TEST_CASE("single lag and precondition") {
    GridFunction f(8, 0.5);
    const auto cov = spectral_to_covariance(f, 0);
    CHECK(cov.rho.size() == 1);
    CHECK(cov.rho[0] == doctest::Approx(M_PI).epsilon(1e-12)); // 2 pi * 0.5
    CHECK_THROWS_AS(spectral_to_covariance(f, 128), std::invalid_argument);
}

TEST_CASE("asymmetric input records a warning") {
    GridFunction f(8, 1.0);
    f.values[3] = 2.0; // breaks f(w) = f(1-w)
    const auto cov = spectral_to_covariance(f, 4);
    CHECK(cov.asymmetry_warning());
}

TEST_CASE("toeplitz eigenvalues") {
    SUBCASE("identity") {
        CovarianceSequence cov;
        cov.rho = {1.0, 0.0, 0.0, 0.0, 0.0};
        for (std::size_t m : {1u, 3u, 5u})
            CHECK(min_toeplitz_eigenvalue(cov, m) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("rank-one pair") {
        CovarianceSequence cov;
        cov.rho = {1.0, 1.0};
        CHECK(min_toeplitz_eigenvalue(cov, 2) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    }
    SUBCASE("known 3x3 spectrum") {
        // [2 1 0; 1 2 1; 0 1 2] has eigenvalues 2 + sqrt(2) {-1, 0, 1}
        CovarianceSequence cov;
        cov.rho = {2.0, 1.0, 0.0};
        CHECK(min_toeplitz_eigenvalue(cov, 3) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("order exceeding the available lags") {
        CovarianceSequence cov;
        cov.rho = {1.0, 0.5};
        CHECK_THROWS_AS(min_toeplitz_eigenvalue(cov, 3), std::invalid_argument);
    }
}

TEST_CASE("exponential family estimates produce positive definite covariances") {
    const WaveletBasis basis = build_basis("symmlet8", 8);
    GaussianStream gs(21);
    for (int t = 0; t < 5; ++t) {
        ExpFamilyParams p = ExpFamilyParams::zero(2, 4);
        for (auto& v : p.theta) v = 0.4 * gs.next();
        const GridFunction f = eval_family(p, basis);
        const auto cov = spectral_to_covariance(f, 64, CovarianceSource::nonlinear_estimate);
        CHECK(min_toeplitz_eigenvalue(cov, 64) >= -1e-8);
    }
}

TEST_CASE("covariance csv") {
    CovarianceSequence cov;
    cov.rho = {1.0, 0.25, -0.125};
    const auto path = std::filesystem::temp_directory_path() / "wavespec_cov_test.csv";
    write_csv(cov, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "lag,value");
    std::filesystem::remove(path);
}
