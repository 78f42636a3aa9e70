#include "doctest.h"

#include <cmath>

#include "atsp/nets.hpp"
#include "atsp/snowflake.hpp"
#include "gen.hpp"

using namespace atsp;

namespace {

PointCloud segment_samples(double spacing) {
    PointCloud P(2.0, 2);
    int n = static_cast<int>(std::round(1.0 / spacing));
    for (int i = 0; i <= n; ++i) P.push_back(std::vector<double>{i * spacing, 0.0});
    return P;
}

}  // namespace

TEST_CASE("singleton") {
    PointCloud P(2.0, 2);
    P.push_back(std::vector<double>{0.3, 0.4});
    auto h = build_nets(P, -2, 6);
    for (int k = -2; k <= 6; ++k) CHECK(h.level_size(k) == 1);
    auto G = make_family(h, 4.0);
    for (auto& c : net_ball_counts(G)) CHECK(c.count == 1);
    CHECK(jones_sum(P, G, 2.0, 6).total == 0.0);
    CHECK_THROWS(build_nets(PointCloud(2.0, 2), 0, 1));
}

TEST_CASE("two points at distance 1") {
    PointCloud P(2.0, 2);
    P.push_back(std::vector<double>{0.0, 0.0});
    P.push_back(std::vector<double>{1.0, 0.0});
    auto h = build_nets(P, -1, 3);
    CHECK(h.level_size(-1) == 1);
    CHECK(h.level_size(0) == 2);  // separation 1 >= 1
    auto G = make_family(h, 4.0);
    auto s = jones_sum(P, G, 1.0, 3);
    CHECK(s.total == doctest::Approx(1.0));
}

TEST_CASE("generation-4 snowflake nets satisfy the axioms") {
    auto c = generate(HeightSchedule::constant(0.25), SnowflakeMode::Planar, 2.0, 4);
    auto h = build_nets(c.vertices, 0, 10);
    CHECK(verify_nets(h).ok);
    for (int k = 1; k <= 10; ++k) CHECK(h.level_size(k) >= h.level_size(k - 1));
    // nesting as sets
    auto X3 = h.level(3), X4 = h.level(4);
    for (auto i : X3) CHECK(std::binary_search(X4.begin(), X4.end(), i));
}

TEST_CASE("nets in l_p with several starting seeds") {
    gen::Rng r(31);
    for (double p : {1.5, 3.0}) {
        auto P = gen::cloud(r, p, 3, 400);
        for (std::uint64_t seed : {0u, 5u, 123u}) {
            auto h = build_nets(P, -1, 6, seed);
            CHECK(verify_nets(h).ok);
            CHECK(h.order.front() == seed % P.size());
        }
    }
}

TEST_CASE("collinear sets: Jones sum equals the diameter") {
    auto P = segment_samples(1.0 / 64);
    auto G = make_family(build_nets(P, 0, 6), 3.0);
    auto s = jones_sum(P, G, 1.0, 6);
    CHECK(s.diam == doctest::Approx(1.0));
    CHECK(s.total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("segment sampled at 2^-12: counts are comparable to 2^k") {
    auto P = segment_samples(std::ldexp(1.0, -12));
    auto G = make_family(build_nets(P, 0, 10), 2.0);
    for (auto& c : net_ball_counts(G)) {
        if (c.k < 2) continue;
        CHECK(c.count >= std::ldexp(1.0, c.k - 2));
        CHECK(c.count <= std::ldexp(1.0, c.k + 2));
    }
}

TEST_CASE("diameter") {
    gen::Rng r(37);
    for (double p : {1.5, 2.0, 4.0}) {
        auto P = gen::cloud(r, p, 3, 300);
        double brute = 0.0;
        NormKernel k(p);
        for (std::size_t i = 0; i < P.size(); ++i)
            for (std::size_t j = i + 1; j < P.size(); ++j) brute = std::max(brute, k.dist(P[i], P[j]));
        CHECK(diameter(P) == brute);
    }
}

TEST_CASE("level helpers") {
    CHECK(diam_level(1.0) == 0);
    CHECK(diam_level(0.75) == 1);
    CHECK(diam_level(3.0) == -1);
    // A 2^-k >= 16 spacing
    int k = finest_level_for_spacing(4.0, 1.0 / 1024.0);
    CHECK(4.0 * std::ldexp(1.0, -k) >= 16.0 / 1024.0);
    CHECK(4.0 * std::ldexp(1.0, -(k + 1)) < 16.0 / 1024.0);
}

TEST_CASE("grid queries are exhaustive") {
    gen::Rng r(41);
    auto P = gen::cloud(r, 3.0, 4, 500);
    SpatialGrid grid(P, 0.3);
    NormKernel k(3.0);
    for (int t = 0; t < 50; ++t) {
        std::size_t c = r.integer(0, 499);
        auto got = grid.within(P[c], 0.3);
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < P.size(); ++i)
            if (k.dist(P[i], P[c]) <= 0.3 * (1 + kBallSlack)) want.push_back(i);
        CHECK(got == want);
    }
}

TEST_CASE("fit cache") {
    auto c = generate(HeightSchedule::constant(0.2), SnowflakeMode::Planar, 2.0, 3);
    auto G = make_family(build_nets(c.vertices, 0, 4), 4.0);
    FitCache cache;
    auto a = evaluate_family(c.vertices, G, 4, &cache);
    std::size_t misses = cache.misses();
    auto b = evaluate_family(c.vertices, G, 4, &cache);
    CHECK(cache.misses() == misses);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].beta == b[i].beta);
}

TEST_CASE("coarse level bound") {
    std::vector<BallBeta> none;
    auto s = jones_sum_from(none, 1.0, 4.0, 0, 2.0, 5);
    // sum_{k<0} (1/(8 2^-k))^2 8 2^-k = sum_{k<0} 2^k / 8 = 1/8
    CHECK(s.coarse_bound == doctest::Approx(0.125));
    CHECK(std::isinf(jones_sum_from(none, 1.0, 4.0, 0, 1.0, 5).coarse_bound));
}
