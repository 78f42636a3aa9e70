#pragma once
// Independent high-precision reference computations for tests. Nothing here
// calls into the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using hp = boost::multiprecision::cpp_dec_float_50;

inline hp hp_norm(std::span<const double> x, double p) {
    hp P(p), s(0);
    for (double v : x) s += pow(abs(hp(v)), P);
    return pow(s, 1 / P);
}

inline hp hp_dist(std::span<const double> x, std::span<const double> y, double p) {
    hp P(p), s(0);
    for (std::size_t i = 0; i < x.size(); ++i) s += pow(abs(hp(x[i]) - hp(y[i])), P);
    return pow(s, 1 / P);
}

// Newton on s^p - (1/2 - s)^p - eta^p in 50 digits. The residual is convex for
// p >= 2 and concave for p < 2, so start from the upper resp. lower end of the
// eta <= 1/16 bracket; iterates are then monotone.
inline hp solve_s_newton(double p, double eta) {
    hp P(p), E(eta), half(0.5);
    hp target = pow(E, P);
    if (eta == 0) return hp(0.25);
    hp s = p >= 2 ? hp(0.25) + pow(4 * E, P) / (4 * P) : hp(0.25) + 3 * pow(4 * E, P) / (32 * P);
    for (int it = 0; it < 200; ++it) {
        hp f = pow(s, P) - pow(half - s, P) - target;
        hp df = P * pow(s, P - 1) + P * pow(half - s, P - 1);
        hp step = f / df;
        s -= step;
        if (abs(step) < hp(1e-45)) break;
    }
    return s;
}

// Modulus of convexity of l_p (Hanner / Clarkson).
// p >= 2: 1 - (1 - (eps/2)^p)^{1/p}.
// 1 < p <= 2: delta solves ((1 - d + eps/2))^p + |1 - d - eps/2|^p = 2, Hanner's equation.
inline double delta_lp(double p, double eps) {
    if (p >= 2.0) return 1.0 - std::pow(1.0 - std::pow(eps / 2.0, p), 1.0 / p);
    auto g = [&](double d) {
        return std::pow(1.0 - d + eps / 2.0, p) + std::pow(std::fabs(1.0 - d - eps / 2.0), p) - 2.0;
    };
    double lo = 0.0, hi = 1.0;  // g(0) >= 0 >= g(1)
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (lo + hi);
        (g(m) > 0 ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

// Modulus of smoothness of l_p (Lindenstrauss).
// 1 < p <= 2: (1 + t^p)^{1/p} - 1; p >= 2: (((1+t)^p + |1-t|^p)/2)^{1/p} - 1.
inline double rho_lp(double p, double t) {
    if (p <= 2.0) return std::pow(1.0 + std::pow(t, p), 1.0 / p) - 1.0;
    return std::pow(0.5 * (std::pow(1.0 + t, p) + std::pow(std::fabs(1.0 - t), p)), 1.0 / p) - 1.0;
}

inline double triangle_excess_axial(double p, double l, double h) {
    hp P(p), L(l), H(h);
    return static_cast<double>(2 * pow(pow(L / 2, P) + pow(H, P), 1 / P) - L);
}

inline double triangle_excess_diagonal(double p, double l, double h) {
    hp P(p), L(l), H(h);
    hp w = pow(hp(2), -1 / P);
    hp a = w * L / 2 - w * H, b = w * L / 2 + w * H;
    return static_cast<double>(2 * pow(pow(abs(a), P) + pow(abs(b), P), 1 / P) - L);
}

// Brute-force min-max line width in the plane: directions on a fine grid,
// each followed by a golden refinement, exact 1D width for fixed direction
// (only for p = 2, where the distance to a line is linear in the offset).
inline double planar_width_l2(const std::vector<std::array<double, 2>>& pts) {
    auto width = [&](double th) {
        double nx = -std::sin(th), ny = std::cos(th);
        double lo = INFINITY, hi = -INFINITY;
        for (auto& q : pts) {
            double v = q[0] * nx + q[1] * ny;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return 0.5 * (hi - lo);
    };
    const int N = 20000;
    double best = INFINITY, bt = 0;
    for (int i = 0; i < N; ++i) {
        double th = M_PI * i / N;
        double w = width(th);
        if (w < best) best = w, bt = th;
    }
    double a = bt - M_PI / N, b = bt + M_PI / N;
    for (int i = 0; i < 200; ++i) {
        double m1 = a + (b - a) * 0.382, m2 = a + (b - a) * 0.618;
        if (width(m1) < width(m2))
            b = m2;
        else
            a = m1;
    }
    return std::min(best, width(0.5 * (a + b)));
}

}  // namespace oracle
