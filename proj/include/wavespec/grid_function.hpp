#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavespec/fft.hpp"

namespace wavespec {

/**
 * Real-valued function sampled on the dyadic grid omega_i = i / 2^J of [0, 1).
 *
 * This is the shared representation for periodograms, spectral densities and
 * their estimates. Index i always means frequency i / 2^J.
 */
struct GridFunction {
    std::vector<double> values;
    int grid_exponent = 0; // J, values.size() == 2^J

    GridFunction() = default;
    GridFunction(int J, double fill = 0.0)
        : values(std::size_t{1} << J, fill), grid_exponent(J) {
        if (J < 0 || J > 26) throw std::invalid_argument("GridFunction: grid exponent out of range");
    }
    GridFunction(int J, std::vector<double> v) : values(std::move(v)), grid_exponent(J) {
        if (values.size() != (std::size_t{1} << J))
            throw std::invalid_argument("GridFunction: size does not match grid exponent");
    }

    std::size_t size() const { return values.size(); }
    double omega(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(size()); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Rectangle-rule integral over [0, 1).
inline double integral(const GridFunction& g) {
    double s = 0.0;
    for (double v : g.values) s += v;
    return s / static_cast<double>(g.size());
}

/// L2([0,1)) norm under the rectangle rule.
inline double l2_norm(const GridFunction& g) {
    double s = 0.0;
    for (double v : g.values) s += v * v;
    return std::sqrt(s / static_cast<double>(g.size()));
}

inline double l2_distance(const GridFunction& f, const GridFunction& g) {
    if (f.size() != g.size()) throw std::invalid_argument("l2_distance: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = f.values[i] - g.values[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(f.size()));
}

inline double sup_norm(const GridFunction& g) {
    double m = 0.0;
    for (double v : g.values) m = std::max(m, std::abs(v));
    return m;
}

inline double min_value(const GridFunction& g) {
    return *std::min_element(g.values.begin(), g.values.end());
}

inline double max_value(const GridFunction& g) {
    return *std::max_element(g.values.begin(), g.values.end());
}

/// Largest |g(omega) - g(1 - omega)| over the grid; zero for symmetric input.
inline double max_asymmetry(const GridFunction& g) {
    const std::size_t n = g.size();
    double m = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        m = std::max(m, std::abs(g.values[i] - g.values[n - i]));
    return m;
}

/// Writes two columns (omega, value) with a one-line header.
inline void write_csv(const GridFunction& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "omega,value\n";
    out.precision(17);
    for (std::size_t i = 0; i < g.size(); ++i)
        out << g.omega(i) << ',' << g.values[i] << '\n';
}

inline GridFunction read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    std::getline(in, line); // header
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("malformed grid csv: " + path);
        vals.push_back(std::stod(line.substr(comma + 1)));
    }
    if (!is_power_of_two(vals.size()))
        throw std::runtime_error("grid csv length is not a power of two: " + path);
    const int J = log2_exact(vals.size());
    return GridFunction(J, std::move(vals));
}

} // namespace wavespec
