#include "atsp/moduli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <gsl/gsl_multimin.h>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "atsp/projections.hpp"

namespace atsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("moduli: p must be in (1, inf)");
}

// Point of the l_p^2 unit sphere at polar angle th.
std::array<double, 2> unit(double th, const NormKernel& k) {
    std::array<double, 2> v{std::cos(th), std::sin(th)};
    double n = k.norm(v);
    return {v[0] / n, v[1] / n};
}

double norm2(double a, double b, const NormKernel& k) {
    std::array<double, 2> v{a, b};
    return k.norm(v);
}

struct NmProblem {
    const NormKernel* k;
    double t;
};

double rho_objective(double th, double ph, const NormKernel& k, double t) {
    auto x = unit(th, k);
    auto y = unit(ph, k);
    double a = norm2(x[0] + t * y[0], x[1] + t * y[1], k);
    double b = norm2(x[0] - t * y[0], x[1] - t * y[1], k);
    return 0.5 * (a + b) - 1.0;
}

double rho_nm_f(const gsl_vector* v, void* params) {
    auto* pr = static_cast<NmProblem*>(params);
    return -rho_objective(gsl_vector_get(v, 0), gsl_vector_get(v, 1), *pr->k, pr->t);
}

// Second point on the sphere, counterclockwise from th, at distance eps.
std::array<double, 2> partner(double th, double eps, const NormKernel& k) {
    auto x = unit(th, k);
    auto g = [&](double ph) {
        auto y = unit(ph, k);
        return norm2(x[0] - y[0], x[1] - y[1], k) - eps;
    };
    double lo = th, hi = th + std::numbers::pi;
    double glo = g(lo), ghi = g(hi);
    if (glo >= 0.0) return unit(lo, k);
    if (ghi <= 0.0) return unit(hi, k);
    boost::uintmax_t it = 100;
    auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(50), it);
    return unit(0.5 * (r.first + r.second), k);
}

double delta_objective(double th, double eps, const NormKernel& k) {
    auto x = unit(th, k);
    auto y = partner(th, eps, k);
    return 1.0 - 0.5 * norm2(x[0] + y[0], x[1] + y[1], k);
}

}  // namespace

double rho_l2(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("rho_l2: t must be nonnegative");
    return std::hypot(1.0, t) - 1.0;
}

double delta_l2(double eps) {
    if (!(eps >= 0.0) || eps > 2.0) throw std::invalid_argument("delta_l2: eps must lie in [0, 2]");
    return 1.0 - std::sqrt(1.0 - eps * eps / 4.0);
}

double rho_lp_main_term(double p, double t) {
    check_p(p);
    if (p <= 2.0) return std::pow(t, p) / p;
    return 0.5 * (p - 1.0) * t * t;
}

double delta_lp_main_term(double p, double eps) {
    check_p(p);
    if (p <= 2.0) return 0.125 * (p - 1.0) * eps * eps;
    return std::pow(eps, p) * std::pow(2.0, -p) / p;
}

double rho_numeric(double p, double t, std::uint64_t seed) {
    check_p(p);
    if (!(t > 0.0)) throw std::invalid_argument("rho_numeric: t must be positive");
    NormKernel k(p);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    constexpr int N = 48;
    const double h = kTwoPi / N;
    double o1 = U(rng) * h, o2 = U(rng) * h;

    struct Cand {
        double val, th, ph;
    };
    std::vector<Cand> cands;
    cands.reserve(N * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double th = o1 + i * h, ph = o2 + j * h;
            cands.push_back({rho_objective(th, ph, k, t), th, ph});
        }
    std::partial_sort(cands.begin(), cands.begin() + 4, cands.end(),
                      [](const Cand& a, const Cand& b) { return a.val > b.val; });
    double best = cands.front().val;

    NmProblem pr{&k, t};
    gsl_multimin_function fn{&rho_nm_f, 2, &pr};
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
    gsl_vector* x = gsl_vector_alloc(2);
    gsl_vector* step = gsl_vector_alloc(2);
    for (int c = 0; c < 4; ++c) {
        gsl_vector_set(x, 0, cands[c].th);
        gsl_vector_set(x, 1, cands[c].ph);
        gsl_vector_set_all(step, h / 2);
        gsl_multimin_fminimizer_set(s, &fn, x, step);
        for (int it = 0; it < 400; ++it) {
            if (gsl_multimin_fminimizer_iterate(s)) break;
            if (gsl_multimin_fminimizer_size(s) < 1e-12) break;
        }
        best = std::max(best, -gsl_multimin_fminimizer_minimum(s));
    }
    gsl_vector_free(step);
    gsl_vector_free(x);
    gsl_multimin_fminimizer_free(s);
    return best;
}

double delta_numeric(double p, double eps, std::uint64_t seed) {
    check_p(p);
    if (!(eps >= 0.0) || eps > 2.0) throw std::invalid_argument("delta_numeric: eps must lie in [0, 2]");
    if (eps == 0.0) return 0.0;
    NormKernel k(p);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    constexpr int N = 96;
    const double h = kTwoPi / N;
    double off = U(rng) * h;
    std::vector<std::pair<double, double>> vals;
    vals.reserve(N);
    for (int i = 0; i < N; ++i) {
        double th = off + i * h;
        vals.push_back({delta_objective(th, eps, k), th});
    }
    std::partial_sort(vals.begin(), vals.begin() + 3, vals.end());
    double best = vals.front().first;
    for (int c = 0; c < 3; ++c) {
        double th0 = vals[c].second;
        auto f = [&](double th) { return delta_objective(th, eps, k); };
        boost::uintmax_t it = 60;
        auto r = boost::math::tools::brent_find_minima(f, th0 - h, th0 + h, 40, it);
        best = std::min(best, r.second);
    }
    return std::max(best, 0.0);
}

double rho_upper(double p, double t) {
    check_p(p);
    if (!(t >= 0.0)) throw std::invalid_argument("rho_upper: t must be nonnegative");
    if (t <= 0.5) return std::min(t, 2.0 * rho_lp_main_term(p, t));
    return t;
}

TriangleExcess triangle_excess_bound_check(const LpVector& x, const LpVector& y, const LpVector& z, double r) {
    double dxy = dist(x, y), dyz = dist(y, z), dxz = dist(x, z);
    if (!(r > 0.0) || r < std::max(dxy, dyz) * (1.0 - 1e-14))
        throw std::invalid_argument("triangle_excess_bound_check: r must be at least max(|x-y|, |y-z|)");
    double excess = dxy + dyz - dxz;
    double d = dist_to_segment(y, x, z).distance;
    double eps = std::min(d / r, 2.0);
    double bound = 2.0 * r * delta_numeric(x.p(), eps, 0);
    return {excess, bound, excess >= bound - 1e-12};
}

double convexity_power(double p) {
    check_p(p);
    return std::max(p, 2.0);
}

double convexity_constant(double p) {
    check_p(p);
    if (p <= 2.0) return 0.5 * (p - 1.0) / 8.0;
    return 0.5 * std::pow(2.0, -p) / p;
}

ConvexityValidation validate_convexity_constant(double p, double c, int grid) {
    double q = convexity_power(p);
    ConvexityValidation v{true, INFINITY, 0.0};
    const double lo = std::log(2e-2), hi = std::log(2.0);
    for (int i = 0; i < grid; ++i) {
        double eps = std::exp(lo + (hi - lo) * i / (grid - 1));
        double ratio = delta_numeric(p, eps, 0) / (c * std::pow(eps, q));
        if (ratio < v.worst_ratio) {
            v.worst_ratio = ratio;
            v.worst_eps = eps;
        }
    }
    v.ok = v.worst_ratio >= 1.0;
    return v;
}

}  // namespace atsp
