#include "doctest.h"

#include <cmath>

#include "atsp/lp_core.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace atsp;

TEST_CASE("conjugate exponent") {
    CHECK(conjugate_exponent(2.0) == doctest::Approx(2.0));
    CHECK(conjugate_exponent(3.0) == doctest::Approx(1.5));
    CHECK(conjugate_exponent(1.5) == doctest::Approx(3.0));
    CHECK_THROWS_AS(conjugate_exponent(1.0), std::invalid_argument);
    CHECK_THROWS_AS(conjugate_exponent(0.5), std::invalid_argument);
}

TEST_CASE("AbsPow agrees with std::pow") {
    for (double e : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 0.3, 2.7, 6.0}) {
        AbsPow f(e);
        for (double u : {0.0, 1e-300, 1e-8, 0.3, 1.0, 2.5, 1e10, -0.7, -3.0}) {
            double want = std::pow(std::fabs(u), e);
            CHECK(f(u) == doctest::Approx(want).epsilon(1e-14));
        }
    }
}

TEST_CASE("lp_norm against a 50-digit oracle") {
    gen::Rng r(7);
    for (double p : {1.1, 1.25, 1.5, 2.0, 3.0, 5.0, 7.3, 40.0}) {
        for (int t = 0; t < 200; ++t) {
            auto x = gen::coords(r, 1 + r.integer(1, 9));
            double want = static_cast<double>(oracle::hp_norm(x, p));
            CHECK(lp_norm(x, p) == doctest::Approx(want).epsilon(1e-13));
        }
    }
}

TEST_CASE("norm survives extreme magnitudes") {
    std::vector<double> big{1e300, 1e300}, tiny{1e-310, 3e-310};
    CHECK(std::isfinite(lp_norm(big, 3.0)));
    CHECK(lp_norm(big, 2.0) == doctest::Approx(std::sqrt(2.0) * 1e300));
    CHECK(lp_norm(tiny, 2.0) > 0.0);
}

TEST_CASE("LpVector validation and algebra") {
    LpSpace sp(3.0, 3);
    CHECK_THROWS_AS(LpVector(sp, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(LpVector(sp, {1.0, NAN, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(LpSpace(1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(LpSpace(2.0, 1), std::invalid_argument);
    LpVector a(sp, {1.0, -2.0, 0.5}), b = LpVector::basis(sp, 1);
    auto c = a + 2.0 * b;
    CHECK(c[1] == 0.0);
    CHECK((a - a).norm() == 0.0);
    CHECK_THROWS_AS(a + LpVector::zero(LpSpace(2.0, 3)), std::invalid_argument);
    CHECK(dist(a, b) == doctest::Approx((a - b).norm()));
}

TEST_CASE("duality map identities") {
    gen::Rng r(11);
    for (double p : {1.25, 1.5, 2.0, 3.0, 5.0}) {
        for (int t = 0; t < 300; ++t) {
            auto x = gen::vec(r, p, 2 + r.integer(0, 6));
            auto J = duality_map(x);
            double nx = x.norm();
            CHECK(J.p() == doctest::Approx(conjugate_exponent(p)));
            CHECK(J.norm() == doctest::Approx(nx).epsilon(1e-12));
            CHECK(pairing(J, x) == doctest::Approx(nx * nx).epsilon(1e-12));
        }
    }
    LpSpace sp(3.0, 2);
    CHECK(duality_map(LpVector::zero(sp)).norm() == 0.0);
    // Euclidean: J is the identity.
    LpVector e(LpSpace(2.0, 2), {3.0, -4.0});
    auto Je = duality_map(e);
    CHECK(Je[0] == doctest::Approx(3.0));
    CHECK(Je[1] == doctest::Approx(-4.0));
    CHECK_THROWS_AS(pairing(e, LpVector(LpSpace(3.0, 2), {1.0, 1.0})), std::invalid_argument);
}

TEST_CASE("json round trip") {
    LpVector v(LpSpace(1.5, 3), {0.1, -2.0, 1e-20});
    nlohmann::json j;
    to_json(j, v);
    auto w = lp_vector_from_json(j);
    CHECK(w.p() == 1.5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(w[i] == v[i]);
    CHECK_THROWS(lp_vector_from_json(nlohmann::json{{"p", 2.0}}));
}

TEST_CASE("PointCloud") {
    PointCloud P(2.0, 2);
    P.push_back(std::vector<double>{0.0, 0.0});
    P.push_back(std::vector<double>{1.0, 2.0});
    P.push_back(std::vector<double>{3.0, 4.0});
    CHECK(P.size() == 3);
    auto S = P.subset({2, 0});
    CHECK(S.size() == 2);
    CHECK(S[0][0] == 3.0);
    CHECK(P.with_p(4.0).p() == 4.0);
    CHECK(P.vector(1).norm() == doctest::Approx(std::sqrt(5.0)));
    CHECK_THROWS(P.push_back(std::vector<double>{1.0}));
}
