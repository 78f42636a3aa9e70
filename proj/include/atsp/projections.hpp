#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "atsp/lp_core.hpp"

namespace atsp {

// Affine line anchor + t*direction with |direction|_p = 1.
class Line {
public:
    // direction is normalized; throws if it is zero or spaces differ.
    Line(LpVector anchor, LpVector direction);
    static Line through(const LpVector& a, const LpVector& b);

    const LpVector& anchor() const { return anchor_; }
    const LpVector& direction() const { return direction_; }
    const LpSpace& space() const { return anchor_.space(); }
    LpVector at(double t) const;

private:
    LpVector anchor_;
    LpVector direction_;
};

struct LineDistance {
    double distance;
    double t_star;
};

struct SegmentDistance {
    double distance;
    double t;  // in [0, 1], position along a->b
};

namespace detail {
// Nearest point on {a + t d} to x. d need not be normalized; t is in units of d.
LineDistance line_distance(const double* x, const double* a, const double* d, std::size_t n, const NormKernel& k);
// Same, starting Newton from a nearby parameter t0 (falls back to the bracketed
// solver when Newton does not settle). For repeated solves on slowly moving lines.
LineDistance line_distance_warm(const double* x, const double* a, const double* d, std::size_t n,
                                const NormKernel& k, double t0);
// Same with t clamped to [0, 1] for the segment a -> a + d.
SegmentDistance segment_distance(const double* x, const double* a, const double* d, std::size_t n,
                                 const NormKernel& k);
}  // namespace detail

LineDistance dist_to_line(const LpVector& x, const Line& L);
LpVector metric_projection(const LpVector& x, const Line& L);
SegmentDistance dist_to_segment(const LpVector& x, const LpVector& a, const LpVector& b);

LpVector j_projection(const LpVector& x, const Line& L);
LpVector j_perp(const LpVector& x, const Line& L);

class FlatnessViolation : public std::runtime_error {
public:
    FlatnessViolation(std::size_t index, double distance, double allowed);
    std::size_t index;
    double distance;
    double allowed;
};

class SeparationViolation : public std::runtime_error {
public:
    SeparationViolation(std::size_t i, std::size_t j, double distance, double delta);
    std::size_t i, j;
    double distance;
    double delta;
};

struct OrderedFlatSet {
    std::vector<LpVector> points;
    Line line;
    std::vector<std::size_t> order;  // indices into points, left to right
    std::vector<double> params;      // metric projection parameter per point (input order)
    double alpha;
    double delta;
    // Order by <J(direction), x - anchor>; equals `order` whenever alpha < 1/8.
    std::vector<std::size_t> j_order;
};

// Refuses alpha >= 1/6. Throws FlatnessViolation / SeparationViolation.
OrderedFlatSet order_flat_set(const std::vector<LpVector>& V, const Line& L, double delta, double alpha);

// Sum of |v_{i+1} - v_i|^s along the order.
double chain_variation(const OrderedFlatSet& ordered, double s);

// Right-hand sides of the two chain bounds.
double chain_bound_banach(const OrderedFlatSet& ordered, double s);
// Only meaningful when alpha <= 43/1224; uses moduli::rho_upper.
double chain_bound_smooth(const OrderedFlatSet& ordered, double s);

inline constexpr double kGraphPAlphaMax = 43.0 / 1224.0;

}  // namespace atsp
