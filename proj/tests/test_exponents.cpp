#include <doctest.h>

#include <cmath>

#include "core/exponents.hpp"

using namespace sns;

TEST_CASE("strauss exponent and derived values, d=3") {
    auto t = exponents(3, 3.0, -1);
    // (2-3+sqrt(9+36+4))/6 = (-1+7)/6 = 1
    CHECK(t.strauss == doctest::Approx(1.0).epsilon(1e-15));
    // q~ = 2*8/(4-2) = 8
    CHECK(t.q_tilde == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(t.q_tilde_finite);
    // h(t) = (1-t)^((3*2-4)/2) = 1-t
    CHECK(t.h_power == doctest::Approx(1.0));
    CHECK(t.h(0.25) == doctest::Approx(0.75));
    // theta = 4/(4-(d-2)(alpha-1)) = 2
    CHECK(t.theta == doctest::Approx(2.0));
    CHECK(t.cls == Criticality::InterCritical);
    CHECK(t.p1 == doctest::Approx(10.0 / 3.0));
    CHECK(t.q2 == doctest::Approx(10.0));
}

TEST_CASE("energy-critical endpoint marks q~ infinite") {
    auto t = exponents(3, 5.0, -1);
    CHECK_FALSE(t.q_tilde_finite);
    CHECK(std::isinf(t.q_tilde));
    CHECK(t.cls == Criticality::EnergyCritical);
    auto t15 = exponents(3, 1.5, 1);
    CHECK(t15.cls == Criticality::MassSub);
    CHECK(exponents(3, 1.0 + 4.0 / 3.0, 1).cls == Criticality::MassCritical);
}

TEST_CASE("strichartz admissibility is exact") {
    double inf = std::numeric_limits<double>::infinity();
    CHECK(strichartz_admissible(2.0, inf, 3));
    CHECK(strichartz_admissible(10.0 / 3.0, 10.0 / 3.0, 3));
    CHECK_FALSE(strichartz_admissible(4.0, 4.0, 3));
    // the forbidden endpoint (p,q,d) = (inf,2,2)
    CHECK_FALSE(strichartz_admissible(inf, 2.0, 2));
    // same identity in d=3 is fine: 2/2 = 3(1/2 - 0) fails anyway
    CHECK_FALSE(strichartz_admissible(inf, 2.0, 3));
    // d=1: (inf, 4) is the endpoint pair: 2/4 = 1*(1/2)
    CHECK(strichartz_admissible(inf, 4.0, 1));
    // (p2, q2) in d=3: (30/13, 10)
    CHECK(strichartz_admissible(Rational::make(30, 13), Rational::make(10, 1), 3));
    // p or q below 2 rejected
    CHECK_FALSE(strichartz_admissible(1.5, 12.0, 3));
}

TEST_CASE("rational snapping") {
    auto r = Rational::from_double(10.0 / 3.0);
    CHECK(r.num == 10);
    CHECK(r.den == 3);
    CHECK(Rational::from_double(2.0) == Rational::make(2, 1));
    CHECK(Rational::from_double(std::numeric_limits<double>::infinity()).is_inf());
}

TEST_CASE("exponents rejects bad input") {
    CHECK_THROWS_AS(exponents(3, 1.0, -1), ConfigError);
    CHECK_THROWS_AS(exponents(4, 2.0, -1), ConfigError);
}
