#pragma once
// Hand-rolled generators for property tests. Deterministic given the seed.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "atsp/lp_core.hpp"

namespace gen {

struct Rng {
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    std::mt19937_64 eng;
    double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(eng); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
    bool coin(double prob = 0.5) { return uniform() < prob; }
};

// Coordinates mix scales and exact zeros; occasionally one dominant entry.
inline std::vector<double> coords(Rng& r, std::size_t dim, double scale = 1.0) {
    std::vector<double> x(dim);
    for (auto& v : x) {
        double roll = r.uniform();
        if (roll < 0.1)
            v = 0.0;
        else if (roll < 0.2)
            v = r.normal() * 1e-6;
        else
            v = r.normal();
        v *= scale;
    }
    if (r.coin(0.1)) x[r.integer(0, static_cast<int>(dim) - 1)] = 1e3 * scale;
    return x;
}

inline atsp::LpVector vec(Rng& r, double p, std::size_t dim, double scale = 1.0) {
    return atsp::LpVector(atsp::LpSpace(p, dim), coords(r, dim, scale));
}

inline atsp::LpVector nonzero_vec(Rng& r, double p, std::size_t dim) {
    for (;;) {
        auto v = vec(r, p, dim);
        if (v.norm() > 1e-9) return v;
    }
}

// Point cloud near a line in direction e_1 with small normal noise.
inline atsp::PointCloud noisy_line(Rng& r, double p, std::size_t dim, std::size_t n, double noise) {
    atsp::PointCloud P(p, dim);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(dim, 0.0);
        x[0] = r.uniform(-1.0, 1.0);
        for (std::size_t j = 1; j < dim; ++j) x[j] = noise * r.uniform(-1.0, 1.0);
        P.push_back(x);
    }
    return P;
}

inline atsp::PointCloud cloud(Rng& r, double p, std::size_t dim, std::size_t n) {
    atsp::PointCloud P(p, dim);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(dim);
        for (auto& v : x) v = r.uniform(-1.0, 1.0);
        P.push_back(x);
    }
    return P;
}

}  // namespace gen
