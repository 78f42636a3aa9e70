#include "doctest.h"

#include <cmath>

#include "atsp/projections.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace atsp;

namespace {

// Independent check of the nearest point: dense scan of t plus golden refinement.
double brute_line_dist(const LpVector& x, const Line& L) {
    auto f = [&](double t) { return dist(x, L.at(t)); };
    double c = 0.0;
    // The minimizer lies within |x - anchor| of the anchor parameter.
    double R = 2.0 * dist(x, L.anchor()) + 1.0;
    double best = INFINITY;
    for (int i = -2000; i <= 2000; ++i) {
        double t = R * i / 2000.0;
        double v = f(t);
        if (v < best) best = v, c = t;
    }
    double a = c - R / 2000.0, b = c + R / 2000.0;
    for (int i = 0; i < 120; ++i) {
        double m1 = a + 0.382 * (b - a), m2 = a + 0.618 * (b - a);
        if (f(m1) < f(m2))
            b = m2;
        else
            a = m1;
    }
    return std::min(best, f(0.5 * (a + b)));
}

}  // namespace

TEST_CASE("line construction") {
    LpSpace sp(3.0, 2);
    CHECK_THROWS_AS(Line(LpVector::zero(sp), LpVector::zero(sp)), std::invalid_argument);
    Line L(LpVector::zero(sp), LpVector(sp, {2.0, 0.0}));
    CHECK(L.direction().norm() == doctest::Approx(1.0));
    auto T = Line::through(LpVector(sp, {1.0, 1.0}), LpVector(sp, {2.0, 3.0}));
    CHECK(T.at(0.0)[0] == 1.0);
}

TEST_CASE("Euclidean projection is orthogonal") {
    LpSpace sp(2.0, 2);
    Line L(LpVector::zero(sp), LpVector(sp, {1.0, 0.0}));
    LpVector x(sp, {0.3, 2.0});
    auto d = dist_to_line(x, L);
    CHECK(d.distance == doctest::Approx(2.0));
    CHECK(d.t_star == doctest::Approx(0.3));
    auto pi = metric_projection(x, L);
    CHECK(pi[0] == doctest::Approx(0.3));
    CHECK(pi[1] == doctest::Approx(0.0));
}

TEST_CASE("metric projection matches brute force") {
    gen::Rng r(3);
    for (double p : {1.25, 1.5, 3.0, 5.0}) {
        for (int t = 0; t < 60; ++t) {
            std::size_t n = 2 + r.integer(0, 3);
            Line L(LpVector(LpSpace(p, n), gen::coords(r, n)), gen::nonzero_vec(r, p, n));
            LpVector x(LpSpace(p, n), gen::coords(r, n));
            double got = dist_to_line(x, L).distance;
            double want = brute_line_dist(x, L);
            CHECK(got <= want + 1e-9 * (1.0 + want));
            CHECK(got >= want - 1e-7 * (1.0 + want));
        }
    }
}

TEST_CASE("segment distance clamps") {
    LpSpace sp(4.0, 2);
    LpVector a(sp, {0.0, 0.0}), b(sp, {1.0, 0.0});
    auto s = dist_to_segment(LpVector(sp, {2.0, 0.0}), a, b);
    CHECK(s.distance == doctest::Approx(1.0));
    CHECK(s.t == doctest::Approx(1.0));
    s = dist_to_segment(LpVector(sp, {0.5, 0.25}), a, b);
    CHECK(s.distance == doctest::Approx(0.25));
    CHECK(s.t == doctest::Approx(0.5));
    s = dist_to_segment(LpVector(sp, {0.5, 0.25}), a, a);
    CHECK(s.distance == doctest::Approx(std::pow(std::pow(0.5, 4) + std::pow(0.25, 4), 0.25)));
}

TEST_CASE("J-projection facts (3) and (4)") {
    gen::Rng r(5);
    for (double p : {1.25, 1.5, 2.0, 3.0, 5.0}) {
        for (int t = 0; t < 300; ++t) {
            std::size_t n = 2 + r.integer(0, 4);
            LpSpace sp(p, n);
            Line L(LpVector(sp, gen::coords(r, n)), gen::nonzero_vec(r, p, n));
            LpVector x(sp, gen::coords(r, n));
            auto Pi = j_projection(x, L);
            auto perp = j_perp(x, L);
            double dxl = dist_to_line(x, L).distance;
            double scale = 1.0 + (x - L.anchor()).norm();
            CHECK((Pi - L.anchor()).norm() <= (x - L.anchor()).norm() + 1e-12 * scale);
            CHECK(perp.norm() >= dxl - 1e-10 * scale);
            CHECK(perp.norm() <= 2.0 * dxl + 1e-10 * scale);
            // (1): points of L are fixed
            auto y = L.at(r.uniform(-3, 3));
            CHECK((j_projection(y, L) - y).norm() <= 1e-12 * (1.0 + y.norm()));
        }
    }
}

TEST_CASE("flat set ordering") {
    LpSpace sp(3.0, 2);
    Line L(LpVector::zero(sp), LpVector(sp, {1.0, 0.0}));
    std::vector<LpVector> V{LpVector(sp, {2.0, 0.01}), LpVector(sp, {0.0, -0.01}), LpVector(sp, {1.0, 0.0})};
    auto o = order_flat_set(V, L, 1.0, 0.05);
    CHECK(o.order == std::vector<std::size_t>{1, 2, 0});
    CHECK(o.j_order == o.order);
    CHECK(chain_variation(o, 1.0) <= chain_bound_banach(o, 1.0));
    CHECK(chain_variation(o, 2.0) <= chain_bound_smooth(o, 2.0));
    CHECK_THROWS_AS(order_flat_set(V, L, 1.0, 1.0 / 6.0), std::invalid_argument);
    CHECK_THROWS_AS(order_flat_set(V, L, 1.5, 0.05), SeparationViolation);
    CHECK_THROWS_AS(order_flat_set(V, L, 1.0, 0.001), FlatnessViolation);
}

TEST_CASE("warm-started line distance agrees with the cold solver") {
    gen::Rng r(7);
    for (double p : {1.25, 1.5, 3.0, 5.0}) {
        NormKernel k(p);
        for (int t = 0; t < 200; ++t) {
            std::size_t n = 2 + r.integer(0, 5);
            auto x = gen::coords(r, n), a = gen::coords(r, n);
            auto dv = gen::nonzero_vec(r, p, n);
            auto d = dv.coords();
            auto cold = detail::line_distance(x.data(), a.data(), d.data(), n, k);
            // nearby, far and wrong-side guesses
            for (double g : {cold.t_star * (1 + 1e-3), cold.t_star + 1.0, -cold.t_star - 5.0}) {
                auto warm = detail::line_distance_warm(x.data(), a.data(), d.data(), n, k, g);
                double sc = 1.0 + cold.distance;
                CHECK(warm.distance == doctest::Approx(cold.distance).epsilon(1e-12).scale(sc));
            }
        }
    }
}
