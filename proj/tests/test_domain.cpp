#include <doctest.h>

#include "stripemb/domain.hpp"
#include "stripemb/errors.hpp"

#include <cmath>
#include <numbers>

using namespace stripemb;

TEST_CASE("headline constant and examples") {
    const PExponent p2(2.0);
    const StripDomain d(1, {{0.0, std::numbers::pi}});
    CHECK(d.dim() == 2);
    CHECK_FALSE(d.is_rectangle());
    const EmbeddingConstants e = embedding_norm(p2, d);
    CHECK(std::abs(e.lambda - 1.0) <= 1e-14);
    CHECK(std::abs(e.norm - 1.0 / std::numbers::sqrt2) <= 1e-14);
    CHECK(lambda_closed_form(p2, StripDomain(0, {{0, 1}, {0, 1}})) ==
          doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-14));
    const PExponent p3(3.0);
    CHECK(lambda_closed_form(p3, StripDomain(0, {{0, 1}})) == doctest::Approx(2.0 * std::pow(p3.pi_p(), 3.0)));
    CHECK(lambda_closed_form(p3, StripDomain(0, {{0, 1}})) == doctest::Approx(28.289).epsilon(1e-4));
}

TEST_CASE("norm does not depend on k") {
    const PExponent p(2.0);
    for (std::size_t k : {0u, 1u, 2u}) {
        CHECK(embedding_norm(p, StripDomain(k, {{0.0, std::numbers::pi}})).norm ==
              doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-15));
    }
}

TEST_CASE("p = 1.5 regression value") {
    const PExponent p(1.5);
    CHECK(p.pi_p() == doctest::Approx(4.836798304624581).epsilon(1e-14));
    const double expected = std::pow(1.0 + 0.5 * std::pow(p.pi_p(), 1.5) / std::pow(2.0, 1.5), -1.0 / 1.5);
    const double got = embedding_norm(p, StripDomain(1, {{0.0, 2.0}})).norm;
    CHECK(got == doctest::Approx(expected).epsilon(1e-15));
    CHECK(got == doctest::Approx(0.49396141342559496).epsilon(1e-13));
}

TEST_CASE("lambda scaling and additivity") {
    for (double pv : {1.5, 2.0, 3.0}) {
        const PExponent p(pv);
        const double l1 = lambda_closed_form(p, StripDomain(0, {{0, 1.3}}));
        const double l2 = lambda_closed_form(p, StripDomain(0, {{0, 0.7}}));
        CHECK(lambda_closed_form(p, StripDomain(2, {{0, 1.3}, {0, 0.7}})) == doctest::Approx(l1 + l2));
        CHECK(lambda_closed_form(p, StripDomain(0, {{0, 2.6}})) == doctest::Approx(l1 * std::pow(2.0, -pv)));
        CHECK(lambda_closed_form(p, StripDomain(0, {{5, 6.3}})) == doctest::Approx(l1));
        const double n = embedding_norm(p, StripDomain(0, {{0, 1.3}})).norm;
        CHECK(n > 0.0);
        CHECK(n < 1.0);
        // Wider strips embed with larger norm.
        CHECK(embedding_norm(p, StripDomain(0, {{0, 2.6}})).norm > n);
    }
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(StripDomain(1, {}), DomainError);
    CHECK_THROWS_AS(StripDomain(0, {{1.0, 0.0}}), DomainError);
}
