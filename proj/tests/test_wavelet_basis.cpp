#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "wavespec/rng.hpp"
#include "wavespec/wavelet_basis.hpp"

using namespace wavespec;

namespace {

GridFunction random_grid(int J, std::uint64_t seed) {
    GaussianStream gs(seed);
    GridFunction g(J);
    for (auto& v : g.values) v = gs.next();
    return g;
}

double grid_inner(const GridFunction& a, const GridFunction& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.values[i] * b.values[i];
    return s / double(a.size());
}

} // namespace

TEST_CASE("filter tables") {
    const WaveletBasis haar = build_basis("haar", 8);
    CHECK(haar.lowpass().size() == 2);
    CHECK(haar.lowpass()[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(haar.lowpass()[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(haar.psi_sup() == doctest::Approx(1.0).epsilon(1e-12));

    const WaveletBasis sym = build_basis("symmlet8", 8);
    double sum = 0.0;
    for (double h : sym.lowpass()) sum += h;
    CHECK(sum == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // double-shift orthonormality of the taps
    const auto& h = sym.lowpass();
    for (std::size_t m = 0; 2 * m < h.size(); ++m) {
        double s = 0.0;
        for (std::size_t k = 0; k + 2 * m < h.size(); ++k) s += h[k] * h[k + 2 * m];
        CHECK(std::abs(s - (m == 0 ? 1.0 : 0.0)) < 1e-10);
    }
    // regression constant from the first cascade computation at 2^14
    CHECK(sym.psi_sup() == doctest::Approx(1.349666289677).epsilon(1e-9));

    CHECK_THROWS_AS(build_basis("coiflet", 8), std::invalid_argument);
    CHECK_THROWS_AS(build_basis("haar", 4), std::invalid_argument);
}

TEST_CASE("analyze of a constant") {
    const WaveletBasis basis = build_basis("symmlet8", 10);
    GridFunction one(10, 1.0);
    for (int j0 : {0, 2, 5}) {
        const auto c = basis.analyze(one, j0, 8);
        for (double a : c.scaling) CHECK(a == doctest::Approx(std::pow(2.0, -0.5 * j0)).epsilon(1e-12));
        for (int j = j0; j < 8; ++j)
            for (double b : c.detail(j)) CHECK(std::abs(b) < 1e-12);
    }
}

TEST_CASE("analyze recovers a unit wavelet coefficient") {
    const WaveletBasis basis = build_basis("symmlet8", 10);
    const GridFunction psi = basis.wavelet_function(4, 9);
    const auto c = basis.analyze(psi, 2, 7);
    for (std::size_t k = 0; k < c.scaling.size(); ++k) CHECK(std::abs(c.scaling[k]) < 1e-10);
    for (int j = 2; j < 7; ++j)
        for (std::size_t k = 0; k < c.detail(j).size(); ++k) {
            const double expect = (j == 4 && k == 9) ? 1.0 : 0.0;
            CHECK(std::abs(c.detail(j)[k] - expect) < 1e-10);
        }
}

TEST_CASE("coefficients equal rectangle-rule quadrature against basis samples") {
    const WaveletBasis basis = build_basis("symmlet8", 10);
    const GridFunction g = random_grid(10, 21);
    const auto c = basis.analyze(g, 3, 8);
    // spot-check a handful against the direct quadrature oracle
    std::mt19937 pick(5);
    for (int t = 0; t < 12; ++t) {
        const int j = 3 + int(pick() % 5);
        const int k = int(pick() % (std::size_t{1} << j));
        CHECK(c.detail(j)[std::size_t(k)] ==
              doctest::Approx(grid_inner(g, basis.wavelet_function(j, k))).epsilon(1e-10));
    }
    for (int k = 0; k < 8; ++k)
        CHECK(c.scaling[std::size_t(k)] ==
              doctest::Approx(grid_inner(g, basis.scaling_function(3, k))).epsilon(1e-10));
}

TEST_CASE("parseval and perfect reconstruction") {
    for (const char* name : {"haar", "symmlet8"}) {
        const WaveletBasis basis = build_basis(name, 11);
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const GridFunction g = random_grid(11, 100 + seed);
            const auto c = basis.analyze(g, 0, 11);
            double energy = 0.0;
            for (double a : c.scaling) energy += a * a;
            for (const auto& d : c.details)
                for (double b : d) energy += b * b;
            const double ref = l2_norm(g);
            CHECK(energy == doctest::Approx(ref * ref).epsilon(1e-10));

            const GridFunction back = basis.synthesize(c);
            double sup = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                sup = std::max(sup, std::abs(back.values[i] - g.values[i]));
            CHECK(sup < 1e-10);
        }
    }
}

TEST_CASE("synthesize edge cases") {
    const WaveletBasis basis = build_basis("symmlet8", 9);
    WaveletCoefficients zero;
    zero.j0 = 3;
    zero.j1 = 6;
    zero.scaling.assign(8, 0.0);
    zero.details = {std::vector<double>(8, 0.0), std::vector<double>(16, 0.0), std::vector<double>(32, 0.0)};
    const GridFunction z = basis.synthesize(zero);
    for (double v : z.values) CHECK(v == 0.0);

    WaveletCoefficients dc;
    dc.j0 = 0;
    dc.j1 = 0;
    dc.scaling = {1.0};
    const GridFunction one = basis.synthesize(dc);
    for (double v : one.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("orthonormality of sampled basis functions") {
    const WaveletBasis basis = build_basis("symmlet8", 12);
    std::mt19937 pick(3);
    for (int t = 0; t < 25; ++t) {
        const int j1 = 3 + int(pick() % 6); // levels below J-3
        const int k1 = int(pick() % (std::size_t{1} << j1));
        const int j2 = 3 + int(pick() % 6);
        const int k2 = int(pick() % (std::size_t{1} << j2));
        const double ip = grid_inner(basis.wavelet_function(j1, k1), basis.wavelet_function(j2, k2));
        const double expect = (j1 == j2 && k1 == k2) ? 1.0 : 0.0;
        CHECK(std::abs(ip - expect) < 1e-8);
        const double soip = grid_inner(basis.scaling_function(3, int(pick() % 8)),
                                       basis.wavelet_function(j1, k1));
        CHECK(std::abs(soip) < 1e-8);
    }
}

TEST_CASE("lambda index enumeration") {
    CHECK(lambda_index(0, 1).size() == 2);
    CHECK(lambda_index(3, 8).size() == 256);
    const auto only_scaling = lambda_index(3, 3);
    CHECK(only_scaling.size() == 8);
    for (const auto& [level, k] : only_scaling) CHECK(level == 2);
    for (int j0 = 0; j0 <= 12; ++j0)
        for (int j1 = j0; j1 <= 12; ++j1)
            CHECK(lambda_index(j0, j1).size() == (std::size_t{1} << j1));
    CHECK_THROWS_AS(lambda_index(4, 3), std::invalid_argument);
}

TEST_CASE("level preconditions") {
    const WaveletBasis basis = build_basis("haar", 8);
    const GridFunction g = random_grid(8, 1);
    CHECK_THROWS_AS(basis.analyze(g, 5, 3), std::invalid_argument);
    CHECK_THROWS_AS(basis.analyze(g, 0, 9), std::invalid_argument);
    const GridFunction wrong = random_grid(7, 1);
    CHECK_THROWS_AS(basis.analyze(wrong, 0, 5), std::invalid_argument);
}

TEST_CASE("coefficient csv rows carry the scaling marker") {
    const WaveletBasis basis = build_basis("haar", 8);
    const auto c = basis.analyze(GridFunction(8, 1.0), 2, 4);
    const auto path = std::filesystem::temp_directory_path() / "wavespec_coeffs_test.csv";
    write_csv(c, path.string());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "level,k,value");
    int rows = 0, scaling_rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.rfind("1,", 0) == 0) ++scaling_rows; // level j0 - 1 = 1
    }
    CHECK(rows == 16);
    CHECK(scaling_rows == 4);
    std::filesystem::remove(path);
}

TEST_CASE("coefficient lambda vector round trip") {
    const WaveletBasis basis = build_basis("symmlet8", 9);
    const GridFunction g = random_grid(9, 8);
    const auto c = basis.analyze(g, 2, 6);
    const auto v = c.to_lambda_vector();
    REQUIRE(v.size() == 64);
    const auto back = WaveletCoefficients::from_lambda_vector(2, 6, v);
    CHECK(back.scaling == c.scaling);
    for (int j = 2; j < 6; ++j) CHECK(back.detail(j) == c.detail(j));
}
