// Randomized invariants across modules. Generators are in gen.hpp; seeds are fixed.

#include <algorithm>
#include <cmath>

#include "atsp/arcs.hpp"
#include "atsp/beta.hpp"
#include "atsp/curve_builder.hpp"
#include "atsp/experiments.hpp"
#include "atsp/lp_core.hpp"
#include "atsp/moduli.hpp"
#include "atsp/nets.hpp"
#include "atsp/snowflake.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace atsp;

namespace {
PointCloud planar_cloud(gen::Rng& r, std::size_t n, double spread) {
    PointCloud P(2.0, 2);
    for (std::size_t i = 0; i < n; ++i) P.push_back(std::vector<double>{r.uniform(-1, 1), spread * r.uniform(-1, 1)});
    return P;
}
}  // namespace

TEST_CASE("curve pseudometric: triangle inequality on 10^4 triples (generation-3 curve)") {
    auto c = generate(HeightSchedule::constant(0.25), SnowflakeMode::Planar, 2.0, 3);
    const int N = static_cast<int>(c.vertices.size()) - 1;
    gen::Rng r(101);
    auto d = [&](int i, int j) {
        return curve_pseudometric(c.vertices, static_cast<double>(std::min(i, j)) / N,
                                  static_cast<double>(std::max(i, j)) / N);
    };
    int violations = 0;
    for (int t = 0; t < 10000; ++t) {
        int a = r.integer(0, N), b = r.integer(0, N), e = r.integer(0, N);
        if (d(a, e) > d(a, b) + d(b, e) + 1e-15) ++violations;
        if (d(a, a) != 0.0) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("norm monotonicity |x|_q <= |x|_p for q >= p") {
    gen::Rng r(7);
    for (int t = 0; t < 5000; ++t) {
        double p = r.uniform(1.05, 6.0), q = p + r.uniform(0.0, 4.0);
        auto x = gen::coords(r, static_cast<std::size_t>(r.integer(1, 8)));
        CHECK(lp_norm(x, q) <= lp_norm(x, p) * (1.0 + 1e-14));
    }
}

TEST_CASE("planar beta: invariant under translation and scaling, monotone under inclusion") {
    gen::Rng r(23);
    for (int t = 0; t < 200; ++t) {
        auto P = planar_cloud(r, static_cast<std::size_t>(r.integer(3, 30)), r.uniform(0.0, 0.3));
        LpVector c(LpSpace(2.0, 2), {0.0, 0.0});
        Ball Q(c, 1.5);
        auto b = beta(P, Q).value;

        double lam = std::exp(r.uniform(-3, 3));
        double sx = r.uniform(-5, 5), sy = r.uniform(-5, 5);
        PointCloud S(2.0, 2);
        for (std::size_t i = 0; i < P.size(); ++i)
            S.push_back(std::vector<double>{lam * P[i][0] + sx, lam * P[i][1] + sy});
        Ball QS(LpVector(LpSpace(2.0, 2), {sx, sy}), lam * 1.5);
        CHECK(beta(S, QS).value == doctest::Approx(b).epsilon(1e-9));

        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < P.size(); ++i)
            if (r.coin(0.6)) keep.push_back(i);
        if (keep.size() < 2) continue;
        CHECK(beta(P.subset(keep), Q).value <= b + 1e-12);
    }
}

TEST_CASE("greedy nets are nested, separated and covering on random clouds") {
    gen::Rng r(5);
    for (int t = 0; t < 20; ++t) {
        double p = r.uniform(1.2, 5.0);
        std::size_t dim = static_cast<std::size_t>(r.integer(2, 4));
        auto E = gen::cloud(r, p, dim, static_cast<std::size_t>(r.integer(2, 300)));
        int k0 = diam_level(diameter(E));
        auto h = build_nets(E, k0, k0 + 8, static_cast<std::uint64_t>(t));
        auto chk = verify_nets(h);
        CHECK_MESSAGE(chk.ok, chk.message);
        for (int k = h.k_min; k < h.k_max; ++k) CHECK(h.level_size(k) <= h.level_size(k + 1));
    }
}

TEST_CASE("Jones sums decrease in the exponent") {
    gen::Rng r(9);
    for (int t = 0; t < 10; ++t) {
        auto E = planar_cloud(r, 120, r.uniform(0.0, 0.2));
        int k0 = diam_level(diameter(E));
        auto G = make_family(build_nets(E, k0, k0 + 5), 3.0);
        double prev = INFINITY;
        for (double s : {1.0, 1.5, 2.0, 3.0}) {
            auto J = jones_sum(E, G, s, k0 + 5);
            CHECK(J.total <= prev + 1e-12);
            CHECK(J.total >= J.diam);
            prev = J.total;
        }
    }
}

TEST_CASE("solve_s stays in its bracket and length brackets hold for random constant heights") {
    gen::Rng r(31);
    for (int t = 0; t < 300; ++t) {
        double p = r.uniform(1.1, 8.0), eta = r.uniform(1e-6, 1.0 / 16);
        double s = solve_s(p, eta), u = std::pow(4 * eta, p);
        CHECK(s >= 0.25 + 3.0 / (32 * p) * u - 1e-15);
        CHECK(s <= 0.25 + u / (4 * p) + 1e-15);
        for (const auto& b : length_brackets(HeightSchedule::constant(eta), SnowflakeMode::Lp, p, 6)) CHECK(b.holds);
    }
}

TEST_CASE("generation lengths increase and every edge has length r_n") {
    gen::Rng r(17);
    for (int t = 0; t < 20; ++t) {
        bool planar = r.coin();
        double p = planar ? 2.0 : r.uniform(1.2, 6.0);
        double eta = r.uniform(0.0, planar ? 0.3 : 1.0 / 16);
        auto sch = HeightSchedule::constant(eta);
        double prev = 0.0;
        for (int n = 0; n <= 4; ++n) {
            auto c = generate(sch, planar ? SnowflakeMode::Planar : SnowflakeMode::Lp, p, n);
            CHECK(check_edges(c).ok);
            double L = length_pnorm(c);
            CHECK(L >= prev);
            prev = L;
        }
    }
}

TEST_CASE("triangle excess dominates the convexity bound") {
    gen::Rng r(41);
    for (int t = 0; t < 500; ++t) {
        double p = r.uniform(1.2, 6.0);
        auto x = gen::vec(r, p, 2), y = gen::vec(r, p, 2), z = gen::vec(r, p, 2);
        double R = std::max(dist(x, y), dist(y, z)) * r.uniform(1.0, 2.0);
        if (!(R > 0.0)) continue;
        auto T = triangle_excess_bound_check(x, y, z, R);
        CHECK(T.holds);
    }
}

TEST_CASE("svg: one vertex list per polyline, byte-identical on rerun") {
    gen::Rng r(3);
    for (int t = 0; t < 50; ++t) {
        auto P = planar_cloud(r, static_cast<std::size_t>(r.integer(3, 40)), 1.0);
        auto s = render_svg(P);
        auto a = s.find("points=\""), b = s.find('"', a + 8);
        auto pts = s.substr(a + 8, b - a - 8);
        CHECK(static_cast<std::size_t>(std::count(pts.begin(), pts.end(), ' ') + 1) == P.size());
        CHECK(render_svg(P) == s);
    }
}

TEST_CASE("build_curve visits every point of random noisy lines") {
    gen::Rng r(13);
    for (int t = 0; t < 4; ++t) {
        auto E = gen::noisy_line(r, 2.0, 2, static_cast<std::size_t>(r.integer(10, 40)), 1e-9);
        auto C = certificate_check(E, 240.0, 2.0);
        CHECK(C.covers_all);
        CHECK(C.axioms.ok);
        CHECK(C.length >= C.diam - 1e-12);
    }
}
