#include "doctest.h"

#include <cmath>

#include "atsp/snowflake.hpp"
#include "oracles.hpp"

using namespace atsp;

TEST_CASE("solve_s") {
    CHECK(solve_s(3.0, 0.0) == 0.25);
    for (double eta : {0.01, 0.1, 0.25, 0.4}) CHECK(solve_s(2.0, eta) == doctest::Approx(0.25 + eta * eta).epsilon(1e-14));
    double s = solve_s(5.0, 1.0 / 16);
    CHECK(s == doctest::Approx(static_cast<double>(oracle::solve_s_newton(5.0, 1.0 / 16))).epsilon(1e-13));
    double lo = 0.25 + 3.0 / (32 * 5.0) * std::pow(0.25, 5.0), hi = 0.25 + 1.0 / 20.0 * std::pow(0.25, 5.0);
    CHECK(s >= lo);
    CHECK(s <= hi);
    CHECK_THROWS(solve_s(2.0, 0.5));
    CHECK_THROWS(solve_s(1.0, 0.1));
}

TEST_CASE("refine: planar Figure-2 geometry") {
    std::vector<double> x{0, 0}, y{1, 0};
    auto pts = refine(x, y, 0.25, SnowflakeMode::Planar, 2.0);
    double want[5][2] = {{0, 0}, {5.0 / 16, 0}, {0.5, 0.25}, {11.0 / 16, 0}, {1, 0}};
    for (int i = 0; i < 5; ++i) {
        CHECK(pts[i][0] == doctest::Approx(want[i][0]).epsilon(1e-15));
        CHECK(pts[i][1] == doctest::Approx(want[i][1]).epsilon(1e-15));
    }
    // eta = 0: collinear quarters
    auto flat = refine(x, y, 0.0, SnowflakeMode::Planar, 2.0);
    CHECK(flat[2][0] == 0.5);
    CHECK(flat[2][1] == 0.0);
    CHECK_THROWS(refine(x, x, 0.1, SnowflakeMode::Planar, 2.0));
}

TEST_CASE("refine: l_5 bump along a fresh axis") {
    std::vector<double> x{0, 0}, y{1, 0};
    auto pts = refine(x, y, 1.0 / 16, SnowflakeMode::Lp, 5.0, 1);
    CHECK(pts[2][0] == doctest::Approx(0.5));
    CHECK(pts[2][1] == doctest::Approx(1.0 / 16));
    double s = solve_s(5.0, 1.0 / 16);
    for (int i = 0; i < 4; ++i)
        CHECK(static_cast<double>(oracle::hp_dist(pts[i], pts[i + 1], 5.0)) == doctest::Approx(s).epsilon(1e-13));
    CHECK_THROWS(refine(std::vector<double>{0, 0}, std::vector<double>{1, 1}, 0.05, SnowflakeMode::Lp, 5.0, 1));
}

TEST_CASE("generate: counts, births, edges") {
    auto c0 = generate(HeightSchedule::constant(0.25), SnowflakeMode::Planar, 2.0, 0);
    CHECK(c0.vertices.size() == 2);
    auto c1 = generate(HeightSchedule::constant(0.25), SnowflakeMode::Planar, 2.0, 1);
    CHECK(c1.vertices[2][1] == doctest::Approx(0.25));
    CHECK(c1.vertices[1][0] == doctest::Approx(5.0 / 16));

    auto c = generate(HeightSchedule::constant(1.0 / 16), SnowflakeMode::Lp, 5.0, 3);
    CHECK(c.vertices.size() == 65);
    CHECK(c.vertices.dim() == 4);
    double s = solve_s(5.0, 1.0 / 16);
    CHECK(c.r_n == doctest::Approx(s * s * s).epsilon(1e-15));
    CHECK(check_edges(c).ok);
    std::vector<int> count(4, 0);
    for (int b : c.birth) count[b]++;
    CHECK(count[0] == 2);
    for (int i = 1; i <= 3; ++i) CHECK(count[i] == 3 * (1 << (2 * (i - 1))));
    CHECK(length_pnorm(c) == doctest::Approx(64 * c.r_n).epsilon(1e-13));

    auto big = generate(HeightSchedule::prop4(), SnowflakeMode::Planar, 2.0, 8);
    CHECK(check_edges(big).ok);
    CHECK_THROWS(generate(HeightSchedule::constant(0.3), SnowflakeMode::Planar, 2.0, 2));  // > 1/sqrt(12)
    CHECK_THROWS(generate(HeightSchedule::constant(0.1), SnowflakeMode::Planar, 2.0, 13));
}

TEST_CASE("uniform gap between generations is eta_{n+1} r_n at midpoints") {
    auto sched = HeightSchedule::prop4();
    auto c = generate(sched, SnowflakeMode::Planar, 2.0, 5);
    for (int n = 0; n < 5; ++n) {
        auto a = c.generation(n), b = c.generation(n + 1);
        double gap = 0.0;
        for (std::size_t e = 0; e + 1 < a.size(); ++e) {
            // midpoint of edge e in gamma_n vs the apex in gamma_{n+1}
            double mx = 0.5 * (a[e][0] + a[e + 1][0]), my = 0.5 * (a[e][1] + a[e + 1][1]);
            gap = std::max(gap, std::hypot(b[4 * e + 2][0] - mx, b[4 * e + 2][1] - my));
        }
        CHECK(gap == doctest::Approx(sched.eta(n + 1) * c.r(n)).epsilon(1e-9));
    }
}

TEST_CASE("r_n comparisons") {
    auto cp = generate(HeightSchedule::prop4(), SnowflakeMode::Planar, 2.0, 6);
    for (int n = 0; n < 6; ++n) CHECK(cp.r(n + 1) <= cp.r(n) / 3.0);
    auto cl = generate(HeightSchedule::prop1(5.0), SnowflakeMode::Lp, 5.0, 6);
    for (int n = 0; n < 6; ++n) CHECK(cl.r(n + 1) <= cl.r(n) / 2.0);
}

TEST_CASE("schedules") {
    auto p2 = HeightSchedule::prop2();
    CHECK(4 * p2.eta(1) * p2.eta(1) == doctest::Approx(1.0 / (16 * std::log(16.0))));
    auto p4 = HeightSchedule::prop4();
    CHECK(4 * p4.eta(1) * p4.eta(1) == doctest::Approx(1.0 / (3 * std::pow(std::log(3.0), 2))));
    for (int i = 1; i < 50; ++i) CHECK(p4.eta(i + 1) <= p4.eta(i));
    auto p1 = HeightSchedule::prop1(5.0);
    CHECK(p1.eta(1) <= 1.0 / 16);
    CHECK(p1.i0() == doctest::Approx(11905.0));
    // i0 - 1 would violate the cap
    double i0 = std::round(p1.i0());
    CHECK(1.0 / (i0 * std::pow(std::log(i0), 2)) > std::pow(16.0, -5.0));
    auto p3 = HeightSchedule::prop3(5.0);
    CHECK(p3.eta(1) <= 1.0 / 16);
    auto pq = HeightSchedule::pq(1.5);
    CHECK(pq.eta(1) <= (1.0 / 16) * (1 + 1e-14));
    CHECK(pq.log_i0 == doctest::Approx(64.0));
    auto pq3 = HeightSchedule::pq(1.1);
    CHECK(pq3.eta(1) <= 1.0 / 16);
    CHECK(HeightSchedule::parse("const:0.125", 2.0).eta(7) == 0.125);
    CHECK_THROWS(HeightSchedule::parse("bogus", 2.0));
    CHECK_THROWS(HeightSchedule::parse("const:abc", 2.0));
}

TEST_CASE("q-length recursion agrees with the coordinates") {
    auto sched = HeightSchedule::pq(1.5);
    auto c = generate(sched, SnowflakeMode::Lp, 1.5, 5);
    for (double q : {1.5, 2.0, 3.0}) CHECK(lp_curve_qlength(sched, 1.5, q, 5) == doctest::Approx(length_qnorm(c, q)).epsilon(1e-12));
    CHECK(length_qnorm(c, 1.5) == doctest::Approx(length_pnorm(c)).epsilon(1e-13));
    // edgewise |v|_q <= |v|_p
    NormKernel kp(1.5), kq(2.0);
    for (std::size_t e = 0; e < c.edges.size(); ++e) CHECK(kq.norm(c.edges[e]) <= kp.norm(c.edges[e]) * (1 + 1e-15));
}

TEST_CASE("length brackets") {
    for (auto& b : length_brackets(HeightSchedule::prop4(), SnowflakeMode::Planar, 2.0, 12)) CHECK(b.holds);
    for (double p : {1.5, 5.0})
        for (auto& b : length_brackets(HeightSchedule::constant(1.0 / 16), SnowflakeMode::Lp, p, 8)) CHECK(b.holds);
    CHECK_THROWS(length_brackets(HeightSchedule::constant(0.1), SnowflakeMode::Lp, 3.0, 3));
}

TEST_CASE("polyline clipping") {
    PointCloud poly(2.0, 2);
    poly.push_back(std::vector<double>{-2, 0});
    poly.push_back(std::vector<double>{2, 0});
    auto W = clip_polyline_to_ball(poly, std::vector<double>{0, 0.6}, 1.0);
    REQUIRE(W.size() == 2);
    CHECK(std::fabs(W[0][0]) == doctest::Approx(0.8));
    CHECK(std::fabs(W[1][0]) == doctest::Approx(0.8));
}

TEST_CASE("vertex beta brackets") {
    auto c = generate(HeightSchedule::constant(0.25), SnowflakeMode::Planar, 2.0, 4);
    auto rep = vertex_beta_bounds_check(c, 4);
    CHECK(rep.ok);
    CHECK(rep.vertices.front().beta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.vertices.size() == 257);
    auto cl = generate(HeightSchedule::constant(1.0 / 16), SnowflakeMode::Lp, 5.0, 3);
    CHECK(vertex_beta_bounds_check(cl, 3).ok);
}

TEST_CASE("triangle excess") {
    for (double h : {1e-1, 3e-2, 1e-2, 1e-3}) {
        CHECK(triangle_excess(5.0, TriangleBase::Axial, 1.0, h) ==
              doctest::Approx(oracle::triangle_excess_axial(5.0, 1.0, h)).epsilon(1e-10));
        CHECK(triangle_excess(5.0, TriangleBase::Diagonal, 1.0, h) ==
              doctest::Approx(oracle::triangle_excess_diagonal(5.0, 1.0, h)).epsilon(1e-10));
    }
    CHECK(triangle_excess(5.0, TriangleBase::Axial, 1.0, 1e-2) == doctest::Approx(6.4e-10).epsilon(1e-4));
    CHECK(triangle_excess(5.0, TriangleBase::Diagonal, 1.0, 1e-2) == doctest::Approx(8.0e-4).epsilon(1e-2));
    // the point form agrees where cancellation is harmless
    for (auto base : {TriangleBase::Axial, TriangleBase::Diagonal}) {
        auto t = triangle_points(3.0, base, 1.0, 0.2);
        double ex = lp_dist(t[0], t[1], 3.0) + lp_dist(t[1], t[2], 3.0) - lp_dist(t[0], t[2], 3.0);
        CHECK(ex == doctest::Approx(triangle_excess(3.0, base, 1.0, 0.2)).epsilon(1e-12));
    }
    std::vector<double> hs;
    for (int i = 0; i <= 6; ++i) hs.push_back(std::pow(10.0, -1.5 - 0.25 * i));
    CHECK(triangle_excess_exponents(2.0, TriangleBase::Axial, hs).slope == doctest::Approx(2.0).epsilon(1e-2));
    CHECK(triangle_excess_exponents(2.0, TriangleBase::Diagonal, hs).slope == doctest::Approx(2.0).epsilon(1e-2));
}
