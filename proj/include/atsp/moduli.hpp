#pragma once

#include <cstdint>
#include <string>

#include "atsp/lp_core.hpp"

namespace atsp {

// Closed forms for the Euclidean plane.
double rho_l2(double t);
double delta_l2(double eps);

// Leading terms of the l_p moduli as t, eps -> 0.
double rho_lp_main_term(double p, double t);
double delta_lp_main_term(double p, double eps);

// Sup over sampled unit pairs in l_p^2: a lower estimate of the modulus of smoothness.
double rho_numeric(double p, double t, std::uint64_t seed = 0);
// Inf over sampled unit pairs with |x - y| = eps: an upper estimate of the modulus of convexity.
double delta_numeric(double p, double eps, std::uint64_t seed = 0);

// Envelope used wherever an inequality needs an upper bound for rho.
// min(t, 2 * main term) for t <= 0.5, otherwise t.
double rho_upper(double p, double t);

struct TriangleExcess {
    double excess;
    double bound;
    bool holds;
};

// |x-y| + |y-z| - |x-z| against 2r delta(dist(y,[x,z])/r). Requires r >= max(|x-y|, |y-z|).
TriangleExcess triangle_excess_bound_check(const LpVector& x, const LpVector& y, const LpVector& z, double r);

// Power type of the modulus of convexity of l_p: max(p, 2).
double convexity_power(double p);
// Constant c with delta(eps) >= c eps^max(p,2) used by the filtration checks:
// (p-1)/16 for p <= 2, p^{-1} 2^{-p} / 2 above.
double convexity_constant(double p);

struct ConvexityValidation {
    bool ok;
    double worst_ratio;  // min over the grid of delta_numeric(eps) / (c eps^q)
    double worst_eps;
};
// Compares c eps^q against delta_numeric on a log-spaced grid of eps in [0.02, 2].
ConvexityValidation validate_convexity_constant(double p, double c, int grid = 40);

}  // namespace atsp
