#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "atsp/beta.hpp"
#include "atsp/lp_core.hpp"

namespace atsp {

// A polyline path with vertex i at parameter i / (size - 1). Arcs restrict it to
// a run of consecutive vertices [lo, hi]; their image is that vertex set.
struct Arc {
    const PointCloud* path = nullptr;
    std::size_t lo = 0;
    std::size_t hi = 0;

    double a() const;
    double b() const;
    std::span<const double> start() const { return (*path)[lo]; }
    std::span<const double> end() const { return (*path)[hi]; }
    std::size_t vertex_count() const { return hi - lo + 1; }
    PointCloud image() const;
    // |Start - End|, the length of Edge.
    double edge_length() const;
};

Arc make_arc(const PointCloud& path, std::size_t lo, std::size_t hi);
// Parameter interval [a, b]; endpoints must lie on the vertex grid.
Arc arc_from_params(const PointCloud& path, double a, double b);
// 4-adic arc j at level m of a path with 4^N edges (m <= N).
Arc dyadic_arc(const PointCloud& path, int level, std::size_t j);
// Number N with #edges = 4^N; throws otherwise.
int four_adic_depth(const PointCloud& path);
// The four 4-adic children of an arc whose edge count is a positive multiple of 4.
std::vector<Arc> children(const Arc& tau);

double arc_diam(const Arc& tau);
// Polygonal length of the path over the arc (exact variation of the polyline).
double arc_variation(const Arc& tau);

struct ArcBetaTilde {
    double value = 0.0;
    bool degenerate = false;  // Diam = 0, value set to 0
    std::size_t witness = 0;  // vertex index attaining the sup
    double diam = 0.0;
};

// sup over the image of dist(x, Edge) / Diam.
ArcBetaTilde arc_beta_tilde(const Arc& tau);

// Line-fit beta of the image with window diameter Diam; never above arc_beta_tilde.
double arc_beta(const Arc& tau, const FitOptions& opt = {});

// diam of the vertices with parameter in [a, b].
double curve_pseudometric(const PointCloud& path, double a, double b);

// sum of child edge lengths minus the edge length of tau. Children must tile tau.
double delta_excess(const Arc& tau, const std::vector<Arc>& kids);

// sup over child edges of the distance to Edge(tau). Distance to a segment is
// convex along a segment, so the child endpoints attain it.
double discretized_edge_distance(const Arc& tau, const std::vector<Arc>& kids);

// sup over Edge(inner) of dist(., Edge(outer)).
double edge_excess(const Arc& inner, const Arc& outer);

// 4-adic filtration over levels n0..n1 of a path with 4^N edges, N > n1.
struct Filtration {
    const PointCloud* path = nullptr;
    int n0 = 0;
    int n1 = 0;
    int depth = 0;  // N
    double rho = 4.0;
    // Measured over levels n0..N-1: A_lower rho^-m <= Diam <= A_upper rho^-m.
    double A_upper = 0.0;
    double A_lower = 0.0;
    std::vector<std::vector<Arc>> levels;  // levels[m - n0], m = n0..N-1
    std::vector<std::vector<double>> diams;

    const std::vector<Arc>& level(int m) const { return levels.at(static_cast<std::size_t>(m - n0)); }
    double diam(int m, std::size_t j) const { return diams.at(static_cast<std::size_t>(m - n0)).at(j); }
};

Filtration make_filtration(const PointCloud& path, int n0, int n1, double rho = 4.0);

struct AxiomCheck {
    bool ok = true;
    std::string message;
};

// Tree structure, geometric diameters, trivial overlaps, partitioning.
AxiomCheck check_filtration_axioms(const Filtration& F);

struct ArcRecord {
    int level = 0;
    std::size_t index = 0;
    double diam = 0.0;
    double delta = 0.0;
    double d = 0.0;
    double beta_tilde = 0.0;
    double beta = -1.0;           // optimizer beta, -1 when not computed
    double excess_lhs = 0.0;      // 2c d^p / Diam^(p-1)
    bool excess_ok = true;
    double dsum = 0.0;            // sum of d over the maximal-descendant chain
    bool dsum_ok = true;
};

struct FiltrationReport {
    int n0 = 0, n1 = 0, depth = 0;
    double p = 2.0;  // convexity power
    double c = 0.0;
    double rho = 4.0;
    double A_upper = 0.0, A_lower = 0.0;
    double K = 0.0;  // constant of the aggregate bound
    bool axioms_ok = true;
    std::string axioms_message;
    std::vector<ArcRecord> arcs;
    std::size_t excess_failures = 0;
    double excess_worst_ratio = 0.0;  // max of lhs / Delta
    std::size_t dsum_failures = 0;
    bool delta_nonneg = true;
    double delta_sum = 0.0;        // over levels n0..N-1
    double var_minus_edges = 0.0;  // sum var - sum |edges| at level n0
    bool delta_sum_ok = true;
    double I = 0.0;  // (sum over levels n0..n1 of beta_tilde^p Diam)^(1/p)
    double I_bound = 0.0;
    bool aggregate_ok = true;
    bool beta_le_beta_tilde = true;
    bool ok = true;
};

// Evaluates the filtration inequalities on the 4-adic arcs of levels n0..n1.
// The per-arc descendant chains run to level N-1, where the telescoping ends
// exactly because single-edge arcs have arc beta 0.
FiltrationReport verify_filtration(const PointCloud& path, int n0, int n1, double p_convexity, double c,
                                   double rho = 4.0, bool with_beta = false);

}  // namespace atsp
