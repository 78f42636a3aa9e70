#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "atsp/beta.hpp"
#include "atsp/lp_core.hpp"

namespace atsp {

// Uniform grid over (at most) three coordinates, those with the largest spread.
// Any point within l_p distance r of a query is within l_inf distance r in the
// projected coordinates, so scanning the neighbouring cells is exhaustive.
class SpatialGrid {
public:
    SpatialGrid(const PointCloud& P, double cell);
    // Indices i (ascending) with |P[i] - c|_p <= radius * (1 + kBallSlack). Requires radius <= cell.
    std::vector<std::size_t> within(std::span<const double> c, double radius) const;
    // Candidate superset without the exact distance filter.
    void candidates(std::span<const double> c, std::vector<std::size_t>& out) const;

private:
    std::uint64_t key(const std::array<long long, 3>& cell) const;
    std::array<long long, 3> cell_of(std::span<const double> x) const;
    const PointCloud* P_;
    double cell_;
    std::vector<std::size_t> axes_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

double diameter(const PointCloud& E);

struct NetHierarchy {
    std::shared_ptr<const PointCloud> points;
    int k_min = 0;
    int k_max = 0;
    // Net points in insertion order; X_k is the prefix of length prefix[k - k_min].
    std::vector<std::size_t> order;
    std::vector<std::size_t> prefix;

    std::vector<std::size_t> level(int k) const;
    std::size_t level_size(int k) const { return prefix.at(k - k_min); }
};

// Greedy farthest-point nets, level by level, each level seeded with the
// previous one. The first point is index (seed mod #E); seed 0 = lowest index.
NetHierarchy build_nets(const PointCloud& E, int k_min, int k_max, std::uint64_t seed = 0);
NetHierarchy build_nets(std::shared_ptr<const PointCloud> E, int k_min, int k_max, std::uint64_t seed = 0);

struct NetCheck {
    bool ok = true;
    std::string message;
};
// Nesting, separation and covering; exhaustive up to `exhaustive_limit`
// points, sampled pairs above that.
NetCheck verify_nets(const NetHierarchy& h, std::size_t exhaustive_limit = 10000, std::uint64_t seed = 0);

struct FamilyBall {
    int k;
    std::size_t center;  // index into the ground set
    double radius;
};

struct MultiresolutionFamily {
    NetHierarchy hierarchy;
    double A;
    std::vector<FamilyBall> balls;
};

MultiresolutionFamily make_family(NetHierarchy h, double A);

struct BallBeta {
    int k;
    std::size_t center;
    double radius;
    double beta;
    std::size_t count;
};

// Cache of line fits keyed by the exact member set; windows at coarse scales
// often contain the same points.
class FitCache {
public:
    const LineFit& get(const PointCloud& P, const std::vector<std::size_t>& idx, const FitOptions& opt);
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    struct Entry {
        std::vector<std::size_t> idx;
        LineFit fit;
    };
    std::unordered_map<std::uint64_t, std::vector<Entry>> map_;
    std::size_t hits_ = 0, misses_ = 0;
};

// beta for every ball with k <= k_cutoff.
std::vector<BallBeta> evaluate_family(const PointCloud& E, const MultiresolutionFamily& G, int k_cutoff,
                                      FitCache* cache = nullptr);

struct LevelSum {
    int k;
    std::size_t balls;
    double contribution;
    double max_beta;
};

struct JonesSum {
    double diam;
    double total;
    double r;
    int k_cutoff;
    std::vector<LevelSum> per_level;
    // Bound for the levels coarser than the hierarchy (one net point each,
    // beta <= diam E / diam Q); infinite when r <= 1.
    double coarse_bound;
};

JonesSum jones_sum_from(const std::vector<BallBeta>& betas, double diamE, double A, int k_min, double r,
                        int k_cutoff);
JonesSum jones_sum(const PointCloud& E, const MultiresolutionFamily& G, double r, int k_cutoff);

struct LevelCount {
    int k;
    std::size_t count;
    double ratio;  // count / 2^k
};
std::vector<LevelCount> net_ball_counts(const MultiresolutionFamily& G);

// Finest level whose window radius A 2^{-k} is still at least 2^margin times the
// vertex spacing of a discretized curve.
int finest_level_for_spacing(double A, double spacing, int margin = 4);

// Unique k0 with 2^{-k0} <= d < 2^{1-k0}.
int diam_level(double d);

}  // namespace atsp
