#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atsp/lp_core.hpp"
#include "atsp/projections.hpp"

namespace atsp {

class Ball {
public:
    Ball(LpVector center, double radius);
    const LpVector& center() const { return center_; }
    double radius() const { return radius_; }
    // Metric diameter of the ambient ball.
    double diam() const { return 2.0 * radius_; }
    Ball dilate(double lambda) const { return Ball(center_, lambda * radius_); }

private:
    LpVector center_;
    double radius_;
};

// Closed-ball membership uses a relative slack so that points placed exactly
// on the sphere (neighbouring curve vertices) count as inside.
inline constexpr double kBallSlack = 1e-12;

std::vector<std::size_t> ball_members(const PointCloud& E, std::span<const double> center, double radius);

// inf over lines of the sup distance, for the points P[idx].
struct LineFit {
    double width = 0.0;  // sup distance to the witness line
    double lower = 0.0;  // certified lower bound for the infimum
    std::vector<double> anchor;
    std::vector<double> direction;  // unit in l_p
    std::string method;
};

struct FitOptions {
    std::uint64_t seed = 0;
    int all_pairs_limit = 24;  // use every pair as a start when the set is this small
    int subsample = 12;        // otherwise a farthest-point subsample of this size
    int starts_refined = 3;
    // Final smoothing parameter relative to the sup; the witness is within
    // a few times this of the local optimum.
    double rel_accuracy = 1e-6;
    // Index (into idx) of points whose chord should also be tried, e.g. arc endpoints.
    int chord_first = -1;
    int chord_last = -1;
};

LineFit fit_line_minmax(const PointCloud& P, const std::vector<std::size_t>& idx, const FitOptions& opt = {});

// Sup over P[idx] of the distance to the line anchor + R direction.
double sup_distance(const PointCloud& P, const std::vector<std::size_t>& idx, std::span<const double> anchor,
                    std::span<const double> direction);

struct BetaResult {
    double value;  // sup over E cap Q of dist(., witness) / diam Q
    Line witness;
    std::string method;
    double certified_gap;  // value minus the certified lower bound
    std::size_t count;     // #(E cap Q)
};

BetaResult beta(const PointCloud& E, const Ball& Q, const FitOptions& opt = {});
BetaResult beta(const std::vector<LpVector>& E, const Ball& Q, const FitOptions& opt = {});

struct BilipReport {
    double beta1;
    double beta2;
    double C;  // norm equivalence constant n^{|1/p1 - 1/p2|}
    bool holds;
};

// Same coordinates and window, two exponents. Checks C^-2 b1 <= b2 <= C^2 b1 up to slack.
BilipReport beta_bilip_check(const PointCloud& E, std::span<const double> center, double radius, double p1, double p2,
                             double slack = 1e-6);

}  // namespace atsp
