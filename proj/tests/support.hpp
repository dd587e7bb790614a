#pragma once

#include "dyncenter/io_core.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace dctest {

using dyncenter::io::Matrix;
using dyncenter::io::Vector;

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(DC_FIXTURE_DIR) / name;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Non-negative matrix with every column sum at most `max_col_sum`.
inline Matrix random_productive(std::mt19937_64& rng, Eigen::Index n, double max_col_sum = 0.8) {
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            // Some exact zeros, as real tables have.
            a(i, j) = uniform(rng, 0.0, 1.0) < 0.15 ? 0.0 : uniform(rng, 0.0, 1.0);
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double s = a.col(j).sum();
        const double target = uniform(rng, 0.05, max_col_sum);
        if (s > 0.0) a.col(j) *= target / s;
    }
    return a;
}

/// Balanced flow table with strictly positive final demand, hence productive.
inline dyncenter::io::IoTable random_table(std::mt19937_64& rng, Eigen::Index n) {
    Matrix z(n, n);
    Vector f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            z(i, j) = uniform(rng, 0.0, 1.0) < 0.1 ? 0.0 : uniform(rng, 0.0, 100.0);
        }
        f(i) = uniform(rng, 1.0, 200.0);
    }
    const Vector x = z.rowwise().sum() + f;
    return dyncenter::io::IoTable::create({}, z, f, x);
}

/// Probability vector of length m with occasional zeros.
inline std::vector<double> random_shares(std::mt19937_64& rng, std::size_t m) {
    std::vector<double> v(m);
    double total = 0.0;
    for (auto& x : v) {
        x = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : uniform(rng, 0.0, 1.0);
        total += x;
    }
    if (total == 0.0) {
        v[0] = 1.0;
        total = 1.0;
    }
    for (auto& x : v) x /= total;
    return v;
}

}  // namespace dctest
