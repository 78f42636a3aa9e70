#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "atsp/lp_core.hpp"
#include "json.hpp"

namespace atsp {

// Relative heights eta_i, i >= 1.
//   constant:  eta_i = eta_bar
//   log type:  eta_i^ps = delta / ((i + j0) * log(i + i0)^a), j0 = i0 or 0
// i0 can be astronomically large (t:pq schedule at small p), so it is kept
// as log_i0 and log(i + i0) = log_i0 + log1p(i / i0).
struct HeightSchedule {
    enum class Kind { Constant, Prop2, Prop4, Prop3, Prop1, Pq };
    Kind kind = Kind::Constant;
    double eta_bar = 0.0;
    double ps = 2.0;  // power of eta in the defining relation
    double delta = 0.0;
    double a = 1.0;
    double log_i0 = 0.0;
    bool shift = true;  // j0 = i0 when true, else 0

    double eta(int i) const;
    std::string name() const;
    // Finite i0 when it fits in a double, +inf otherwise.
    double i0() const;
    nlohmann::json describe() const;

    static HeightSchedule constant(double eta);
    // 4 eta_i^2 = 1/((i+15) log(i+15))
    static HeightSchedule prop2();
    // 4 eta_i^2 = 1/((i+2) log(i+2)^2)
    static HeightSchedule prop4();
    // eta_i^p = delta/((i+i0) log(i+i0)), delta = 1, smallest integer i0 with eta_1 <= 1/16
    static HeightSchedule prop3(double p);
    // eta_i^p = delta/((i+i0) log(i+i0)^2), same choice of delta, i0
    static HeightSchedule prop1(double p);
    // eta_i^p = delta/(i log(i+i0)), same choice of delta, i0
    static HeightSchedule pq(double p);
    // "const:<eta>", "prop2", "prop4", "prop3", "prop1", "pq"
    static HeightSchedule parse(const std::string& s, double p);
};

enum class SnowflakeMode { Planar, Lp };

// Unique s in [1/4, 1/2) with s^p = (1/2 - s)^p + eta^p.
double solve_s(double p, double eta);

// Bump one segment x -> y. Planar: along the left unit normal (rotation by +90
// degrees). Lp: along coordinate `bump_axis`, which must be zero in y - x.
// Checks that the four edges have length s |y - x|.
std::array<std::vector<double>, 5> refine(std::span<const double> x, std::span<const double> y, double eta,
                                          SnowflakeMode mode, double p, std::size_t bump_axis = 0);

struct SnowflakeCurve {
    SnowflakeMode mode;
    double p;  // 2 in planar mode
    int n;
    HeightSchedule schedule;
    PointCloud vertices;        // 4^n + 1 points
    PointCloud edges;           // 4^n edge vectors, built recursively (no cancellation)
    std::vector<int> birth;     // generation in which each vertex first appears
    std::vector<double> eta;    // eta_1..eta_n
    std::vector<double> s;      // s_1..s_n
    double r_n;                 // common edge length s_1 ... s_n

    // Vertices of generation j <= n (every 4^{n-j}-th vertex).
    PointCloud generation(int j) const;
    double r(int j) const;
};

struct GenerateOptions {
    int max_planar = 12;
    int max_lp = 10;
};

SnowflakeCurve generate(const HeightSchedule& schedule, SnowflakeMode mode, double p, int n,
                        const GenerateOptions& opt = {});

// Sum of l_p edge lengths (= 4^n r_n).
double length_pnorm(const SnowflakeCurve& c);
// Sum of l_q edge lengths from the stored edge vectors.
double length_qnorm(const SnowflakeCurve& c, double q);
// l_q length of the generation-n lp curve by a scalar recursion on edge
// q-norms; no vertices are stored.
double lp_curve_qlength(const HeightSchedule& schedule, double p, double q, int n);

struct EdgeCheck {
    bool ok;
    double worst_rel;
};
// Every edge has length r_n (relative tolerance) and no two vertices coincide.
EdgeCheck check_edges(const SnowflakeCurve& c, double rel_tol = 1e-12);

struct LengthBracket {
    int n;
    double value;  // Lip(gamma_n)
    double lower;
    double upper;
    bool holds;
};
// Planar: prod (1 + 4 eta_i^2) against exp(10/3 sum eta^2), exp(4 sum eta^2).
// Lp: prod 4 s_i against exp(sum (4 eta)^p / (4p)), exp(sum (4 eta)^p / p).
std::vector<LengthBracket> length_brackets(const HeightSchedule& schedule, SnowflakeMode mode, double p, int n_max,
                                           double rel_slack = 1e-12);

// exp(C_q sum_{i<=n} eta_i^q i^{q/p - 1}) with C_q = 8^q / q: the l_q length
// bound for curves built in l_p with q > p.
double qlength_bound(const HeightSchedule& schedule, double p, double q, int n);

// r_0 = 1, r_m = s_1 ... s_m, from the schedule alone.
std::vector<double> edge_lengths(const HeightSchedule& schedule, SnowflakeMode mode, double p, int m_max);

struct RoughBound {
    int n;
    double r;
    double lower;  // 0.3 log(n + 16) 4^-n
    double upper;  // 1.1 log(n + 15) 4^-n
    bool holds;    // strict on both sides
};
// Planar edge lengths of the schedule against the rough bounds, 1 <= n <= n_max.
std::vector<RoughBound> rough_r_bounds(const HeightSchedule& schedule, int n_max);

struct SeriesBracket {
    long N;
    double partial;  // sum_{n=3}^N 1 / (n log^2 n)
    double lower;    // partial + 1 / log(N + 1)
    double upper;    // partial + 1 / log N
};
// Integral test on the decreasing tail: 1/log(N+1) <= sum_{n>N} <= 1/log N.
SeriesBracket log_square_series(long N);

struct VertexBeta {
    std::size_t index;  // vertex index within generation j
    int birth;
    double beta;
    double lower;
    double upper;
    bool ok;
};

struct VertexBetaReport {
    int j;
    double r_j;
    bool ok;
    double tol;
    std::vector<VertexBeta> vertices;
};

// beta of the polygon Gamma_j in the closed window B(v, r_j), for every vertex
// of Gamma_j. The polygon is clipped to the window exactly, so the extreme
// points of the intersection are the clip points and the interior vertices.
// Bracket c eta_i <= beta <= 2 eta_i with c = sqrt(3)/4 (planar) or 1/4 (lp).
VertexBetaReport vertex_beta_bounds_check(const SnowflakeCurve& c, int j, double tol = 1e-5);

// Extreme points of polygon ∩ closed ball.
PointCloud clip_polyline_to_ball(const PointCloud& poly, std::span<const double> center, double radius);

enum class TriangleBase { Axial, Diagonal };

// Excess |a-b| + |b-c| - |a-c| for the isosceles triangle with base length l
// and height h (axial or diagonal base) in l_p^2, evaluated without
// cancellation.
double triangle_excess(double p, TriangleBase base, double l, double h);
// The same triangle as points a, b, c.
std::array<std::array<double, 2>, 3> triangle_points(double p, TriangleBase base, double l, double h);

struct ExponentFit {
    double slope;
    double coefficient;  // exp(intercept), l = 1
    std::vector<double> h;
    std::vector<double> excess;
};
// Least squares fit of log excess against log h.
ExponentFit triangle_excess_exponents(double p, TriangleBase base, const std::vector<double>& h_grid, double l = 1.0);

}  // namespace atsp
