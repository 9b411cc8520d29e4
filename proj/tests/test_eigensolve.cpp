#include <doctest.h>

#include "stripemb/domain.hpp"
#include "stripemb/eigensolve.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace stripemb;

namespace {

double discrete_sine_eigenvalue(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n + 1);
    const double s = std::sin(0.5 * std::numbers::pi * h);
    return 4.0 / (h * h) * s * s;
}

}  // namespace

TEST_CASE("grid function layout and validation") {
    const Rectangle box({{0.0, 1.0}, {0.0, 2.0}});
    GridFunction u(box, {3, 4});
    CHECK(u.size() == 12);
    CHECK(u.spacing()[0] == doctest::Approx(0.25));
    CHECK(u.spacing()[1] == doctest::Approx(0.4));
    CHECK(u.cell_volume() == doctest::Approx(0.1));
    CHECK(u.stride(0) == 4);
    CHECK(u.stride(1) == 1);
    const std::vector<double> x = u.node(5);
    CHECK(x[0] == doctest::Approx(0.5));
    CHECK(x[1] == doctest::Approx(0.8));
    CHECK_THROWS_AS(GridFunction(box, {3}), DomainError);
    CHECK_THROWS_AS(GridFunction(box, {3, 4}, std::vector<double>(5)), DomainError);
}

TEST_CASE("discrete quotient of the sine vector") {
    const std::size_t n = 31;
    GridFunction u(Rectangle({{0.0, 1.0}}), {n});
    for (std::size_t i = 0; i < n; ++i) {
        u.values()[i] = std::sin(std::numbers::pi * u.node(i)[0]);
    }
    CHECK(discrete_rayleigh(u, PExponent(2.0)) == doctest::Approx(discrete_sine_eigenvalue(n)).epsilon(1e-13));
    GridFunction zero(Rectangle({{0.0, 1.0}}), {n});
    CHECK_THROWS_AS(discrete_rayleigh(zero, PExponent(2.0)), ZeroFunctionError);
}

TEST_CASE("analytic gradient matches finite differences") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> val(0.1, 1.0);
    for (double pv : {1.5, 2.0, 3.0}) {
        const PExponent p(pv);
        GridFunction u(Rectangle({{0.0, 1.0}, {0.0, 1.5}}), {9, 11});
        for (double& v : u.values()) {
            v = val(rng);
        }
        const std::vector<double> g = discrete_rayleigh_gradient(u, p);
        std::uniform_int_distribution<std::size_t> pick(0, u.size() - 1);
        for (int t = 0; t < 10; ++t) {
            const std::size_t i = pick(rng);
            const double x = u.values()[i];
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            u.values()[i] = x + h;
            const double fp = discrete_rayleigh(u, p);
            u.values()[i] = x - h;
            const double fm = discrete_rayleigh(u, p);
            u.values()[i] = x;
            const double fd = (fp - fm) / (2 * h);
            CHECK(std::abs(g[i] - fd) <= 1e-6 * std::max(std::abs(fd), 1e-3 * std::abs(discrete_rayleigh(u, p))));
        }
    }
}

TEST_CASE("p = 2 solver reaches the discrete eigenvalue") {
    const EigenResult r = first_eigenpair(PExponent(2.0), Rectangle({{0.0, 1.0}}), {63});
    CHECK(r.lambda_h == doctest::Approx(discrete_sine_eigenvalue(63)).epsilon(1e-9));
    double norm = 0.0;
    for (double v : r.eigenfunction.values()) {
        CHECK(v >= 0.0);
        norm += v * v * r.eigenfunction.cell_volume();
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(r.trace.size() >= 2);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        CHECK(r.trace[i] <= r.trace[i - 1] * (1.0 + 1e-14));
    }
    CHECK(eigenfunction_error(r, PExponent(2.0)) <= 1e-6);
}

TEST_CASE("p != 2 solver approaches the closed form from above") {
    for (double pv : {1.5, 3.0}) {
        const PExponent p(pv);
        const EigenResult r = first_eigenpair(p, Rectangle({{0.0, 1.0}}), {127});
        const double lambda = lambda_closed_form(p, StripDomain(0, {{0.0, 1.0}}));
        CAPTURE(pv);
        CHECK(r.lambda_h == doctest::Approx(lambda).epsilon(1e-3));
    }
}

TEST_CASE("solver errors") {
    const PExponent p(2.0);
    CHECK_THROWS_AS(first_eigenpair(p, Rectangle({{0.0, 1.0}}), {5}), DomainError);
    EigenOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(first_eigenpair(p, Rectangle({{0.0, 1.0}}), {15}, bad), DomainError);
    EigenOptions short_run;
    short_run.max_iter = 1;
    short_run.sobolev_gradient = false;
    try {
        (void)first_eigenpair(PExponent(3.0), Rectangle({{0.0, 1.0}}), {63}, short_run);
        FAIL("expected EigenNonConvergence");
    } catch (const EigenNonConvergence& e) {
        CHECK(e.last_iterate().size() == 63);
        CHECK(e.residual() > 0.0);
    }
}
