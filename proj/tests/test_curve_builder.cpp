#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "atsp/curve_builder.hpp"
#include "atsp/moduli.hpp"
#include "atsp/snowflake.hpp"
#include "gen.hpp"

using namespace atsp;

namespace {

PointCloud cloud(double p, std::size_t dim, const std::vector<std::vector<double>>& pts) {
    PointCloud E(p, dim);
    for (const auto& x : pts) E.push_back(x);
    return E;
}

NetSequenceData pipeline(const PointCloud& E, int extra_levels, double A_G = 240.0) {
    int k0 = diam_level(diameter(E));
    auto h = build_nets(E, k0, k0 + extra_levels);
    return from_multiresolution(E, h, A_G);
}

// a = (0,0), b = (1,0) at level 0; c = (1/2, h) joins at level 1.
NetSequenceData bump(double h, double alpha) {
    auto E = std::make_shared<const PointCloud>(cloud(2.0, 2, {{0, 0}, {1, 0}, {0.5, h}}));
    LpSpace sp(2.0, 2);
    Line axis(LpVector(sp, {0, 0}), LpVector(sp, {1, 0}));
    NetSequenceData D;
    D.points = E;
    D.V = {{0, 1}, {0, 1, 2}};
    D.rho = {1.0, 0.5};
    D.r0 = 1.0;
    D.alpha = {{alpha, alpha}, {0.0, 0.0, 0.0}};
    D.beta = {{0, 0}, {0, 0, 0}};
    D.lines = {{axis, axis}, {axis, axis, axis}};
    return D;
}

}  // namespace

TEST_CASE("two points: trivial hierarchy") {
    auto E = cloud(2.0, 2, {{0, 0}, {1, 0}});
    auto D = pipeline(E, 3);
    CHECK(D.k0 == 0);
    CHECK(D.A_star == 8.0);
    CHECK(D.alpha1() == doctest::Approx(1.0 / 696));
    CHECK(D.V[0].size() == 2);
    for (const auto& lvl : D.alpha)
        for (double a : lvl) CHECK(a == 0.0);
    auto F = flat_pairs(D, 0);
    CHECK(F.pairs.size() == 2);
    auto C = build_curve(D);
    CHECK(C.tour.size() == 2);
    CHECK(C.length == 1.0);
    auto R = certificate_check(E, 240.0, 1.0);
    CHECK(R.ratio == doctest::Approx(1.0));
    CHECK(R.covers_all);
}

TEST_CASE("preconditions") {
    auto E = cloud(2.0, 2, {{0, 0}, {1, 0}, {0.5, 0.1}});
    auto h = build_nets(E, 0, 4);
    CHECK_THROWS_AS(from_multiresolution(E, h, 200.0), std::invalid_argument);
    auto h_late = build_nets(E, 2, 4);
    CHECK_THROWS_AS(from_multiresolution(E, h_late, 240.0), std::invalid_argument);
    auto D = from_multiresolution(E, h, 240.0);
    CHECK_THROWS(flat_pairs(D, 0, 0.2));
}

TEST_CASE("collinear points: flat everywhere, sorted tour") {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 100; ++i) pts.push_back({i / 99.0, 0.5 * i / 99.0});
    auto E = cloud(2.0, 2, pts);
    auto D = pipeline(E, 9);
    for (const auto& lvl : D.alpha)
        for (double a : lvl) CHECK(a < 1e-9);
    for (int k = 0; k + 1 < static_cast<int>(D.levels()); ++k) {
        auto F = flat_pairs(D, k);
        CHECK(F.pairs.size() == 2 * (D.V[k].size() - 1));
        for (const auto& pr : F.pairs) CHECK(variation_excess(D, k, pr, 1.0) < 1e-12);
    }
    auto S = sums(D, 1.0);
    CHECK(S.S_V < 1e-6);
    CHECK(S.non_flat == 0);
    CHECK(S.cross_ok);
    CHECK(S.tau1_ok);
    auto C = build_curve(D);
    REQUIRE(C.tour.size() == D.V.back().size());
    bool up = std::is_sorted(C.tour.begin(), C.tour.end());
    bool down = std::is_sorted(C.tour.rbegin(), C.tour.rend());
    CHECK((up || down));
    double diam = diameter(E);
    if (D.V.back().size() == E.size()) CHECK(C.length == doctest::Approx(diam).epsilon(1e-12));
}

TEST_CASE("square corners: one of the three open tour lengths") {
    auto E = cloud(2.0, 2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    auto D = pipeline(E, 3);
    auto C = build_curve(D);
    REQUIRE(C.tour.size() == 4);
    CHECK(std::set<std::size_t>(C.tour.begin(), C.tour.end()).size() == 4);
    const double s2 = std::sqrt(2.0);
    double L = C.length;
    bool known = std::fabs(L - 3.0) < 1e-12 || std::fabs(L - (2.0 + s2)) < 1e-12 || std::fabs(L - (1.0 + 2.0 * s2)) < 1e-12;
    CHECK(known);
    CHECK(L <= 4.0);
}

TEST_CASE("hand-built bump: flat pair, chain, excess, sums") {
    const double alpha = 1.0 / 700, h = 0.0007;
    auto D = bump(h, alpha);
    auto rep = verify_axioms(D);
    CHECK_MESSAGE(rep.ok, rep.axiom << " " << rep.message);

    auto F = flat_pairs(D, 0);
    REQUIRE(F.pairs.size() == 2);
    CHECK(F.pairs[0].v == 0);
    CHECK(F.pairs[0].vp == 1);
    CHECK(F.pairs[0].side == 1);
    CHECK(F.pairs[1].v == 1);
    CHECK(F.pairs[1].side == -1);
    CHECK(between_chain(D, 0, F.pairs[0]) == std::vector<std::size_t>{0, 2, 1});
    CHECK(between_chain(D, 0, F.pairs[1]) == std::vector<std::size_t>{1, 2, 0});

    // 2 sqrt(1/4 + h^2) - 1, written without cancellation
    const double tau1 = 4.0 * h * h / (2.0 * std::sqrt(0.25 + h * h) + 1.0);
    CHECK(variation_excess(D, 0, F.pairs[0], 1.0) == doctest::Approx(tau1).epsilon(1e-8));
    // squares: 2 (1/4 + h^2) < 1, clamped at 0
    CHECK(variation_excess(D, 0, F.pairs[0], 2.0) == 0.0);

    auto S = sums(D, 1.0);
    CHECK(S.flat_pairs == 2);
    CHECK(S.non_flat == 0);
    CHECK(S.S_1 == doctest::Approx(2.0 * tau1).epsilon(1e-8));
    CHECK(S.S_V == doctest::Approx(2.0 * alpha));
    CHECK(S.S_rho == doctest::Approx(2.0 * rho_upper(2.0, 102.0 * alpha)));
    CHECK(S.cross_ok);
    CHECK(S.tau1_ok);

    // alpha at the threshold: a contributes nothing
    auto G = D;
    G.alpha[0][0] = G.alpha1();
    auto F2 = flat_pairs(G, 0);
    REQUIRE(F2.pairs.size() == 1);
    CHECK(F2.pairs[0].v == 1);
    auto S2 = sums(G, 1.0);
    CHECK(S2.non_flat == 1);
    CHECK(S2.S_1 == doctest::Approx(1.0 + tau1).epsilon(1e-8));

    auto C = build_curve(D);
    CHECK(C.tour == std::vector<std::size_t>{0, 2, 1});
    CHECK(C.flat_insertions == 1);
}

TEST_CASE("axiom violations name the offending level and point") {
    auto D = bump(0.01, 1.0 / 700);  // 0.01 > alpha rho_1 r0
    auto rep = verify_axioms(D);
    CHECK_FALSE(rep.ok);
    CHECK(rep.axiom == "V5");
    CHECK(rep.k == 0);
    CHECK(rep.v == 0);

    auto E = std::make_shared<const PointCloud>(cloud(2.0, 2, {{0, 0}, {1, 0}, {0.5, 0}, {0.7, 0}}));
    auto B = bump(0.0, 1.0 / 700);
    B.points = E;
    B.V = {{0, 1}, {0, 1, 2, 3}};
    B.alpha[1].push_back(0.0);
    B.beta[1].push_back(0.0);
    B.lines[1].push_back(B.lines[1][0]);
    auto r3 = verify_axioms(B);
    CHECK_FALSE(r3.ok);
    CHECK(r3.axiom == "V3");
    CHECK(r3.k == 1);

    auto P = bump(0.0007, 1.0 / 700);
    P.V[1] = {1, 0, 2};
    CHECK(verify_axioms(P).axiom == "V2");
}

TEST_CASE("planar snowflake generation 5: axioms, sums, tour") {
    auto c = generate(HeightSchedule::constant(0.25), SnowflakeMode::Planar, 2.0, 5);
    const auto& E = c.vertices;
    int k0 = diam_level(diameter(E));
    auto h = build_nets(E, k0, k0 + 12);
    auto D = from_multiresolution(E, h, 240.0);
    CHECK(verify_axioms(D).ok);
    CHECK(D.V.back().size() == E.size());
    // The level-0 windows hold all of E: beta is the width of E over 480 r0.
    std::vector<std::size_t> all(E.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    CHECK(D.beta[0][0] == doctest::Approx(fit_line_minmax(E, all).width / (480.0 * D.r0)).epsilon(1e-12));
    CHECK(D.alpha[0][0] == doctest::Approx(8.0 * 240.0 * D.beta[0][0]));
    auto S = sums(D, 1.0);
    CHECK(S.cross_ok);
    CHECK(S.tau1_ok);
    auto C = build_curve(D);
    CHECK(C.tour.size() == E.size());
    CHECK(std::set<std::size_t>(C.tour.begin(), C.tour.end()).size() == E.size());
    CHECK(C.length <= C.ceiling);
}

TEST_CASE("planar snowflake generation 6: tour length against the curve") {
    auto c = generate(HeightSchedule::constant(0.25), SnowflakeMode::Planar, 2.0, 6);
    const auto& E = c.vertices;
    int k0 = diam_level(diameter(E));
    auto h = build_nets(E, k0, k0 + 14);
    auto D = from_multiresolution(E, h, 240.0);
    auto C = build_curve(D);
    REQUIRE(C.tour.size() == E.size());
    double K = C.length / length_pnorm(c);
    MESSAGE("tour / curve length = " << K);
    // regression fixture: the builder does not recover the curve order exactly
    CHECK(K >= 1.0 - 1e-12);
    CHECK(K <= 1.31);
}

TEST_CASE("perturbed line: tau_1 bound and chain bounds on every flat pair") {
    gen::Rng rng(7);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 80; ++i) pts.push_back({i / 79.0, 1e-8 * rng.uniform(-1.0, 1.0), 1e-8 * rng.uniform(-1.0, 1.0)});
    auto E = cloud(3.0, 3, pts);
    auto D = pipeline(E, 8);
    auto S = sums(D, 1.0);
    CHECK(S.flat_pairs > 0);
    CHECK(S.tau1_ok);
    CHECK(S.cross_ok);
    CHECK(S.worst_tau1_ratio <= 1.0);
    for (int k = 0; k + 1 < static_cast<int>(D.levels()); ++k) {
        auto F = flat_pairs(D, k);
        for (const auto& pr : F.pairs) {
            auto chain = between_chain(D, k, pr);
            std::vector<LpVector> V;
            for (auto i : chain) V.push_back(E.vector(i));
            std::size_t j = std::find(D.V[k].begin(), D.V[k].end(), pr.v) - D.V[k].begin();
            double a = D.alpha[k][j];
            double rk1 = D.rho[k + 1] * D.r0;
            auto ord = order_flat_set(V, D.lines[k][j], rk1, std::min(a + 1e-9, 0.16));
            CHECK(chain_variation(ord, 1.0) <= chain_bound_banach(ord, 1.0) * (1.0 + 1e-12));
        }
    }
    auto C = build_curve(D);
    CHECK(C.length <= C.ceiling);
}

TEST_CASE("certificate: segment ratio is 1") {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({i / 39.0, 0.0});
    auto R = certificate_check(cloud(2.0, 2, pts), 240.0, 2.0);
    CHECK(R.axioms.ok);
    CHECK(R.covers_all);
    CHECK(R.ratio == doctest::Approx(1.0).epsilon(1e-9));
}
