#include "atsp/nets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>

namespace atsp {

// ---------------------------------------------------------------- grid

SpatialGrid::SpatialGrid(const PointCloud& P, double cell) : P_(&P), cell_(cell) {
    if (!(cell > 0.0) || !std::isfinite(cell)) throw std::invalid_argument("SpatialGrid: cell must be positive");
    const std::size_t n = P.size(), d = P.dim();
    std::vector<std::pair<double, std::size_t>> ext;
    for (std::size_t j = 0; j < d; ++j) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
            lo = std::min(lo, P[i][j]);
            hi = std::max(hi, P[i][j]);
        }
        ext.push_back({n ? hi - lo : 0.0, j});
    }
    std::stable_sort(ext.begin(), ext.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; j < std::min<std::size_t>(3, d); ++j) axes_.push_back(ext[j].second);
    for (std::size_t i = 0; i < n; ++i) buckets_[key(cell_of(P[i]))].push_back(static_cast<std::uint32_t>(i));
}

std::array<long long, 3> SpatialGrid::cell_of(std::span<const double> x) const {
    std::array<long long, 3> c{0, 0, 0};
    for (std::size_t a = 0; a < axes_.size(); ++a) c[a] = static_cast<long long>(std::floor(x[axes_[a]] / cell_));
    return c;
}

std::uint64_t SpatialGrid::key(const std::array<long long, 3>& c) const {
    // Collisions only merge buckets; callers filter by distance.
    std::uint64_t h = 1469598103934665603ull;
    for (long long v : c) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ull;
        h ^= h >> 29;
    }
    return h;
}

void SpatialGrid::candidates(std::span<const double> c, std::vector<std::size_t>& out) const {
    out.clear();
    auto base = cell_of(c);
    const int na = static_cast<int>(axes_.size());
    std::vector<std::uint64_t> seen;
    int total = 1;
    for (int a = 0; a < na; ++a) total *= 3;
    for (int m = 0; m < total; ++m) {
        auto cc = base;
        int r = m;
        for (int a = 0; a < na; ++a) {
            cc[a] += r % 3 - 1;
            r /= 3;
        }
        std::uint64_t kk = key(cc);
        if (std::find(seen.begin(), seen.end(), kk) != seen.end()) continue;
        seen.push_back(kk);
        auto it = buckets_.find(kk);
        if (it == buckets_.end()) continue;
        for (auto i : it->second) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

std::vector<std::size_t> SpatialGrid::within(std::span<const double> c, double radius) const {
    if (radius > cell_ * (1.0 + 1e-9)) throw std::invalid_argument("SpatialGrid::within: radius exceeds cell size");
    std::vector<std::size_t> cand, out;
    candidates(c, cand);
    NormKernel k(P_->p());
    const double lim = radius * (1.0 + kBallSlack);
    for (auto i : cand)
        if (k.dist((*P_)[i], c) <= lim) out.push_back(i);
    return out;
}

// ---------------------------------------------------------------- diameter

double diameter(const PointCloud& E) {
    const std::size_t n = E.size();
    if (n < 2) return 0.0;
    NormKernel k(E.p());
    std::vector<double> c(E.dim(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < E.dim(); ++j) c[j] += E[i][j] / static_cast<double>(n);
    std::vector<std::pair<double, std::size_t>> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = {k.dist(E[i], c), i};
    std::sort(r.begin(), r.end(), [](auto& a, auto& b) { return a.first > b.first; });
    double best = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        if (2.0 * r[a].first <= best) break;
        for (std::size_t b = a + 1; b < n; ++b) {
            if (r[a].first + r[b].first <= best) break;
            best = std::max(best, k.dist(E[r[a].second], E[r[b].second]));
        }
    }
    return best;
}

int diam_level(double d) {
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("diam_level: d must be positive");
    int k0 = -static_cast<int>(std::floor(std::log2(d)));
    while (std::ldexp(1.0, -k0) > d) ++k0;
    while (std::ldexp(1.0, 1 - k0) <= d) --k0;
    return k0;
}

int finest_level_for_spacing(double A, double spacing, int margin) {
    if (!(spacing > 0.0) || !(A > 0.0)) throw std::invalid_argument("finest_level_for_spacing: positive arguments required");
    int k = static_cast<int>(std::floor(std::log2(A / spacing))) - margin;
    while (A * std::ldexp(1.0, -k) < std::ldexp(spacing, margin)) --k;
    while (A * std::ldexp(1.0, -(k + 1)) >= std::ldexp(spacing, margin)) ++k;
    return k;
}

// ---------------------------------------------------------------- nets

std::vector<std::size_t> NetHierarchy::level(int k) const {
    if (k < k_min || k > k_max) throw std::out_of_range("NetHierarchy::level: k outside [k_min, k_max]");
    std::vector<std::size_t> out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(level_size(k)));
    std::sort(out.begin(), out.end());
    return out;
}

NetHierarchy build_nets(const PointCloud& E, int k_min, int k_max, std::uint64_t seed) {
    return build_nets(std::make_shared<const PointCloud>(E), k_min, k_max, seed);
}

NetHierarchy build_nets(std::shared_ptr<const PointCloud> Ep, int k_min, int k_max, std::uint64_t seed) {
    const PointCloud& E = *Ep;
    if (E.size() == 0) throw std::invalid_argument("build_nets: empty ground set");
    if (k_min > k_max) throw std::invalid_argument("build_nets: k_min > k_max");
    const std::size_t n = E.size();
    NormKernel kern(E.p());

    NetHierarchy h;
    h.points = Ep;
    h.k_min = k_min;
    h.k_max = k_max;

    std::vector<double> dmin(n, INFINITY);
    std::vector<char> in(n, 0);
    using Item = std::pair<double, long long>;  // (dmin, -index): ties go to the lowest index
    std::priority_queue<Item> heap;

    auto add = [&](std::size_t c) {
        in[c] = 1;
        dmin[c] = 0.0;
        h.order.push_back(c);
    };
    std::size_t first = static_cast<std::size_t>(seed % n);
    add(first);
    for (std::size_t i = 0; i < n; ++i) {
        if (in[i]) continue;
        dmin[i] = kern.dist(E[i], E[first]);
        heap.push({dmin[i], -static_cast<long long>(i)});
    }

    std::vector<std::size_t> cand;
    for (int k = k_min; k <= k_max; ++k) {
        const double rho = std::ldexp(1.0, -k);
        // After the previous level every dmin is < 2 rho, so a new center can only
        // lower dmin for points within 2 rho of it.
        std::unique_ptr<SpatialGrid> grid;
        if (k > k_min) grid = std::make_unique<SpatialGrid>(E, 2.0 * rho);
        while (!heap.empty()) {
            auto [d, ni] = heap.top();
            std::size_t i = static_cast<std::size_t>(-ni);
            if (in[i] || d != dmin[i]) {
                heap.pop();
                continue;
            }
            if (d < rho) break;
            heap.pop();
            add(i);
            if (grid) {
                grid->candidates(E[i], cand);
            } else {
                cand.resize(n);
                for (std::size_t j = 0; j < n; ++j) cand[j] = j;
            }
            for (auto j : cand) {
                if (in[j]) continue;
                double dj = kern.dist(E[j], E[i]);
                if (dj < dmin[j]) {
                    dmin[j] = dj;
                    heap.push({dj, -static_cast<long long>(j)});
                }
            }
        }
        h.prefix.push_back(h.order.size());
    }
    return h;
}

NetCheck verify_nets(const NetHierarchy& h, std::size_t exhaustive_limit, std::uint64_t seed) {
    const PointCloud& E = *h.points;
    NormKernel kern(E.p());
    const std::size_t n = E.size();
    std::mt19937_64 rng(seed);
    for (int k = h.k_min; k <= h.k_max; ++k) {
        const double rho = std::ldexp(1.0, -k);
        const std::size_t m = h.level_size(k);
        if (k > h.k_min && m < h.level_size(k - 1))
            return {false, "nesting fails at k=" + std::to_string(k)};
        if (m == 0) return {false, "empty net at k=" + std::to_string(k)};
        const auto* X = h.order.data();
        // separation
        if (m <= exhaustive_limit) {
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = a + 1; b < m; ++b)
                    if (kern.dist(E[X[a]], E[X[b]]) < rho)
                        return {false, "separation fails at k=" + std::to_string(k)};
        } else {
            std::uniform_int_distribution<std::size_t> U(0, m - 1);
            for (std::size_t t = 0; t < 50 * exhaustive_limit; ++t) {
                std::size_t a = U(rng), b = U(rng);
                if (a != b && kern.dist(E[X[a]], E[X[b]]) < rho)
                    return {false, "separation fails at k=" + std::to_string(k)};
            }
        }
        // covering
        std::vector<std::size_t> who;
        if (n <= exhaustive_limit) {
            who.resize(n);
            for (std::size_t i = 0; i < n; ++i) who[i] = i;
        } else {
            std::uniform_int_distribution<std::size_t> U(0, n - 1);
            for (std::size_t t = 0; t < exhaustive_limit; ++t) who.push_back(U(rng));
        }
        for (auto i : who) {
            bool ok = false;
            for (std::size_t a = 0; a < m && !ok; ++a) ok = kern.dist(E[i], E[X[a]]) < rho;
            if (!ok) return {false, "covering fails at k=" + std::to_string(k) + " for point " + std::to_string(i)};
        }
    }
    return {true, "ok"};
}

// ---------------------------------------------------------------- families

MultiresolutionFamily make_family(NetHierarchy h, double A) {
    if (!(A > 1.0) || !std::isfinite(A)) throw std::invalid_argument("make_family: inflation A must exceed 1");
    MultiresolutionFamily G{std::move(h), A, {}};
    for (int k = G.hierarchy.k_min; k <= G.hierarchy.k_max; ++k) {
        double r = A * std::ldexp(1.0, -k);
        for (auto c : G.hierarchy.level(k)) G.balls.push_back({k, c, r});
    }
    return G;
}

namespace {

std::uint64_t fnv(const std::vector<std::size_t>& idx) {
    std::uint64_t h = 1469598103934665603ull;
    for (auto i : idx) {
        h ^= static_cast<std::uint64_t>(i);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

const LineFit& FitCache::get(const PointCloud& P, const std::vector<std::size_t>& idx, const FitOptions& opt) {
    auto& bucket = map_[fnv(idx)];
    for (auto& e : bucket)
        if (e.idx == idx) {
            ++hits_;
            return e.fit;
        }
    ++misses_;
    bucket.push_back({idx, fit_line_minmax(P, idx, opt)});
    return bucket.back().fit;
}

std::vector<BallBeta> evaluate_family(const PointCloud& E, const MultiresolutionFamily& G, int k_cutoff,
                                      FitCache* cache) {
    FitCache local;
    FitCache& fc = cache ? *cache : local;
    std::vector<BallBeta> out;
    int k_hi = std::min(k_cutoff, G.hierarchy.k_max);
    std::size_t pos = 0;
    for (int k = G.hierarchy.k_min; k <= k_hi; ++k) {
        const double r = G.A * std::ldexp(1.0, -k);
        SpatialGrid grid(E, r);
        for (; pos < G.balls.size() && G.balls[pos].k == k; ++pos) {
            const auto& b = G.balls[pos];
            auto idx = grid.within(E[b.center], r);
            double beta = 0.0;
            if (idx.size() > 2) beta = fc.get(E, idx, FitOptions{}).width / (2.0 * r);
            out.push_back({k, b.center, r, beta, idx.size()});
        }
    }
    return out;
}

JonesSum jones_sum_from(const std::vector<BallBeta>& betas, double diamE, double A, int k_min, double r,
                        int k_cutoff) {
    if (!(r > 0.0)) throw std::invalid_argument("jones_sum: r must be positive");
    JonesSum s{diamE, diamE, r, k_cutoff, {}, INFINITY};
    for (const auto& b : betas) {
        if (b.k > k_cutoff) continue;
        if (s.per_level.empty() || s.per_level.back().k != b.k) s.per_level.push_back({b.k, 0, 0.0, 0.0});
        auto& L = s.per_level.back();
        double c = b.beta > 0.0 ? std::pow(b.beta, r) * 2.0 * b.radius : 0.0;
        L.balls++;
        L.contribution += c;
        L.max_beta = std::max(L.max_beta, b.beta);
        s.total += c;
    }
    if (r > 1.0) {
        // beta <= diam E / diam Q at every level; geometric tail over k < k_min.
        s.coarse_bound = std::pow(diamE, r) * std::pow(2.0 * A, 1.0 - r) * std::exp2(k_min * (r - 1.0)) /
                         (std::exp2(r - 1.0) - 1.0);
    }
    return s;
}

JonesSum jones_sum(const PointCloud& E, const MultiresolutionFamily& G, double r, int k_cutoff) {
    auto betas = evaluate_family(E, G, k_cutoff);
    return jones_sum_from(betas, diameter(E), G.A, G.hierarchy.k_min, r, k_cutoff);
}

std::vector<LevelCount> net_ball_counts(const MultiresolutionFamily& G) {
    std::vector<LevelCount> out;
    for (int k = G.hierarchy.k_min; k <= G.hierarchy.k_max; ++k) {
        std::size_t c = G.hierarchy.level_size(k);
        out.push_back({k, c, static_cast<double>(c) * std::ldexp(1.0, -k)});
    }
    return out;
}

}  // namespace atsp
