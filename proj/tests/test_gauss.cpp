#include "doctest.h"

#include "specsense/errors.hpp"
#include "specsense/gauss.hpp"

#include <cmath>

using namespace specsense;

TEST_CASE("q_function at reference points") {
    CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q_function(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-9));
    CHECK(q_function(10.0) < 1e-20);
    CHECK(q_function(-10.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("q_function symmetry Q(-t) = 1 - Q(t)") {
    for (double t : {0.25, 0.5, 1.0, 2.0, 3.0}) {
        CHECK(q_function(-t) == doctest::Approx(1.0 - q_function(t)).epsilon(1e-14));
    }
}

TEST_CASE("q_inverse at reference points") {
    CHECK(std::abs(q_inverse(0.5)) <= 1e-9);
    // 1% upper-tail point of the standard normal.
    CHECK(q_inverse(0.01) == doctest::Approx(2.3263478740408408).epsilon(1e-9));
    CHECK(q_inverse(0.025) == doctest::Approx(1.959963984540054).epsilon(1e-9));
}

TEST_CASE("q_inverse round-trips through q_function") {
    for (double p : {0.001, 0.01, 0.05, 0.1, 0.5, 0.9, 0.99, 0.999}) {
        CHECK(q_function(q_inverse(p)) == doctest::Approx(p).epsilon(1e-10));
    }
}

TEST_CASE("q_inverse is strictly decreasing in p") {
    CHECK(q_inverse(0.001) > q_inverse(0.01));
    CHECK(q_inverse(0.01) > q_inverse(0.1));
    CHECK(q_inverse(0.1) > q_inverse(0.5));
    CHECK(q_inverse(0.5) > q_inverse(0.9));
}

TEST_CASE("q_inverse rejects arguments outside (0,1)") {
    CHECK_THROWS_AS(q_inverse(0.0), DomainError);
    CHECK_THROWS_AS(q_inverse(1.0), DomainError);
    CHECK_THROWS_AS(q_inverse(-0.5), DomainError);
    CHECK_THROWS_AS(q_inverse(1.5), DomainError);
}
