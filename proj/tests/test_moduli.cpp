#include "doctest.h"

#include <cmath>

#include "atsp/moduli.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace atsp;

TEST_CASE("Euclidean closed forms") {
    CHECK(rho_l2(0.0) == 0.0);
    CHECK(rho_l2(1.0) == doctest::Approx(std::sqrt(2.0) - 1.0));
    CHECK(delta_l2(2.0) == doctest::Approx(1.0));
    CHECK(delta_l2(1.0) == doctest::Approx(1.0 - std::sqrt(0.75)));
    CHECK_THROWS(delta_l2(2.5));
    CHECK_THROWS(rho_l2(-1.0));
}

TEST_CASE("numeric moduli at p = 2 match closed forms") {
    for (double t : {0.05, 0.3, 1.0, 2.0}) CHECK(rho_numeric(2.0, t) == doctest::Approx(rho_l2(t)).epsilon(1e-8));
    for (double e : {0.05, 0.5, 1.0, 1.9}) CHECK(delta_numeric(2.0, e) == doctest::Approx(delta_l2(e)).epsilon(1e-8));
}

TEST_CASE("delta_numeric against Hanner") {
    for (double p : {1.25, 1.5, 3.0, 5.0}) {
        for (double e : {0.05, 0.2, 0.7, 1.3, 2.0}) {
            double want = oracle::delta_lp(p, e);
            double got = delta_numeric(p, e);
            // an upper estimate of the infimum; the planar modulus is attained
            CHECK(got >= want * (1.0 - 1e-7) - 1e-14);
            CHECK(got <= want * (1.0 + 1e-5) + 1e-14);
        }
    }
}

TEST_CASE("rho_numeric against Lindenstrauss") {
    for (double p : {1.25, 1.5, 1.8, 3.0, 5.0}) {
        for (double t : {0.05, 0.3, 1.0}) {
            double want = oracle::rho_lp(p, t);
            double got = rho_numeric(p, t);
            CHECK(got <= want * (1.0 + 1e-9) + 1e-14);
            CHECK(got >= want * (1.0 - 1e-5));
        }
    }
}

TEST_CASE("rho_upper dominates the modulus") {
    for (double p : {1.25, 1.5, 2.0, 3.0, 5.0})
        for (double t : {0.01, 0.1, 0.3, 0.5, 0.9, 2.0}) CHECK(rho_upper(p, t) >= rho_numeric(p, t) - 1e-12);
}

TEST_CASE("main terms are the small-argument asymptotics") {
    for (double p : {1.5, 3.0}) {
        double t = 1e-3;
        CHECK(rho_numeric(p, t) / rho_lp_main_term(p, t) == doctest::Approx(1.0).epsilon(0.05));
        CHECK(delta_numeric(p, t) / delta_lp_main_term(p, t) == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("convexity constants validate on the grid") {
    for (double p : {1.25, 1.5, 2.0, 3.0, 5.0}) {
        auto v = validate_convexity_constant(p, convexity_constant(p));
        CHECK_MESSAGE(v.ok, "p=" << p << " worst ratio " << v.worst_ratio << " at eps " << v.worst_eps);
    }
    CHECK(convexity_power(1.5) == 2.0);
    CHECK(convexity_power(5.0) == 5.0);
    // Euclidean: delta(eps) >= eps^2 / 8
    CHECK(validate_convexity_constant(2.0, 0.125).ok);
}

TEST_CASE("triangle excess bound") {
    LpSpace sp(5.0, 2);
    LpVector x(sp, {0.0, 0.0}), y(sp, {0.5, 0.1}), z(sp, {1.0, 0.0});
    auto te = triangle_excess_bound_check(x, y, z, 1.0);
    CHECK(te.holds);
    CHECK(te.excess > 0.0);
    CHECK_THROWS(triangle_excess_bound_check(x, y, z, 0.1));
}
