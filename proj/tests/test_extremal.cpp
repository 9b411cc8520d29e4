#include <doctest.h>

#include "stripemb/domain.hpp"
#include "stripemb/errors.hpp"
#include "stripemb/extremal.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace stripemb;

namespace {

void check_gradient(const ExtremalFunction& u, std::span<const double> x) {
    std::vector<double> g(u.dim());
    u.gradient(x, g);
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < u.dim(); ++i) {
        const double h = 1e-6;
        y[i] = x[i] + h;
        const double fp = u.value(y);
        y[i] = x[i] - h;
        const double fm = u.value(y);
        y[i] = x[i];
        CHECK(g[i] == doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
}

}  // namespace

TEST_CASE("rectangle maximizer vanishes on the boundary and is positive inside") {
    const PExponent p(3.0);
    const Rectangle r({{0.0, 1.0}, {-1.0, 2.0}});
    const ExtremalFunction u = rectangle_maximizer(p, r);
    const double corner[] = {0.0, 0.5};
    const double side[] = {0.5, 2.0};
    const double mid[] = {0.5, 0.5};
    const double outside[] = {1.5, 0.5};
    CHECK(std::abs(u.value(corner)) <= 1e-15);
    CHECK(std::abs(u.value(side)) <= 1e-12);
    CHECK(u.value(mid) == doctest::Approx(1.0));
    CHECK(u.value(outside) == 0.0);
    const double pt[] = {0.3, 1.1};
    check_gradient(u, pt);
}

TEST_CASE("strip trial layout") {
    const PExponent p(1.5);
    const StripDomain d(1, {{0.0, 2.0}});
    const ExtremalFunction u = strip_trial(p, d, 3.0);
    const Rectangle box = strip_box(d, 3.0);
    CHECK(box[0].lo == -3.0);
    CHECK(box[0].hi == 3.0);
    CHECK(box[1].hi == 2.0);
    const double zero_line[] = {0.0, 1.0};
    CHECK(std::abs(u.value(zero_line)) <= 1e-15);
    const double pt[] = {1.2, 0.7};
    check_gradient(u, pt);
    const double shift[] = {10.0, 0.0};
    const ExtremalFunction v = u.translated(shift);
    const double pt2[] = {11.2, 0.7};
    CHECK(v.value(pt2) == doctest::Approx(u.value(pt)));
    CHECK(u.scaled(2.0).value(pt) == doctest::Approx(2.0 * u.value(pt)));
    CHECK_THROWS_AS(strip_trial(p, d, 0.0), DomainError);
    CHECK_THROWS_AS(strip_trial(p, StripDomain(0, {{0.0, 1.0}}), 1.0), DomainError);
}

TEST_CASE("u_l norms match the closed forms") {
    for (double pv : {1.5, 2.0, 3.0}) {
        for (double l : {std::numbers::pi, 4 * std::numbers::pi}) {
            const PExponent p(pv);
            const StripDomain d(1, {{0.0, std::numbers::pi}});
            const UlNormReport r = verify_ul_norms(p, d, l);
            CAPTURE(pv);
            CAPTURE(l);
            CHECK(r.func_diff / r.closed_form.func_norm_p <= 1e-7);
            CHECK(r.grad_diff / r.closed_form.grad_norm_p <= 1e-7);
            CHECK(r.quotient == doctest::Approx(r.closed_quotient).epsilon(1e-7));
            const double gap = r.closed_quotient - lambda_closed_form(p, d);
            CHECK(gap == doctest::Approx(std::pow(p.pi_p(), pv) * (pv - 1.0) / std::pow(l, pv)).epsilon(1e-12));
        }
    }
}

TEST_CASE("u_l with two free axes and two intervals") {
    const PExponent p(2.5);
    const StripDomain d(2, {{0.0, 1.0}, {0.0, 1.5}});
    const UlNormReport r = verify_ul_norms(p, d, 1.2, 8);
    CHECK(r.func_diff / r.closed_form.func_norm_p <= 1e-6);
    CHECK(r.grad_diff / r.closed_form.grad_norm_p <= 1e-6);
}

TEST_CASE("Rayleigh quotient of the rectangle maximizer is lambda") {
    for (double pv : {1.5, 2.0, 4.0}) {
        const PExponent p(pv);
        const Rectangle r({{0.0, 1.0}, {0.0, 2.0}});
        const RayleighReport rep = rayleigh(rectangle_maximizer(p, r), r, p);
        CHECK(rep.quotient == doctest::Approx(lambda_closed_form(p, StripDomain(0, r.intervals()))).epsilon(1e-8));
        CHECK(rep.quad_error <= 1e-6 * rep.quotient);
    }
}

TEST_CASE("generic trial functions") {
    const PExponent p(2.0);
    const Rectangle r({{0.0, 1.0}});
    TrialFunction parabola{[](std::span<const double> x) { return x[0] * (1.0 - x[0]); }, {}, {}};
    const RayleighReport rep = rayleigh(parabola, r, p);
    CHECK(rep.quotient == doctest::Approx(10.0).epsilon(1e-8));
    CHECK(rep.quotient >= std::numbers::pi * std::numbers::pi);

    TrialFunction scaled{[](std::span<const double> x) { return -7.0 * x[0] * (1.0 - x[0]); }, {}, {}};
    CHECK(rayleigh(scaled, r, p).quotient == doctest::Approx(rep.quotient).epsilon(1e-8));

    TrialFunction zero{[](std::span<const double>) { return 0.0; }, {}, {}};
    CHECK_THROWS_AS(rayleigh(zero, r, p), ZeroFunctionError);
    CHECK_THROWS_AS(rayleigh(parabola, r, p, 4), DomainError);
}

TEST_CASE("bumps") {
    const Bump b{Rectangle({{0.0, 2.0}, {1.0, 2.0}}), 3.0};
    const double centre[] = {1.0, 1.5};
    const double out[] = {2.5, 1.5};
    CHECK(b.value(centre) == doctest::Approx(3.0));
    CHECK(b.value(out) == 0.0);
    CHECK(b.piece().f(centre) == doctest::Approx(3.0));
    const double x[] = {0.4, 1.3};
    double g[2];
    b.gradient(x, g);
    for (int i = 0; i < 2; ++i) {
        double y[] = {x[0], x[1]};
        y[i] += 1e-6;
        const double fp = b.value(y);
        y[i] -= 2e-6;
        const double fm = b.value(y);
        CHECK(g[i] == doctest::Approx((fp - fm) / 2e-6).epsilon(1e-6));
    }
}

TEST_CASE("function sums") {
    const PExponent p(2.0);
    const Rectangle r({{0.0, 1.0}});
    FunctionSum s(1);
    CHECK(s.empty());
    s.add(2.0, rectangle_maximizer(p, r));
    const TensorGrid g = aligned_grid(s, r, 8);
    const SobolevNorms n = sobolev_norms(s, g, 2.0);
    CHECK(n.func_norm_p == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(n.w_norm(2.0) == doctest::Approx(std::sqrt(2.0 + 2.0 * std::numbers::pi * std::numbers::pi)).epsilon(1e-12));
    s.add(1.0, Bump{Rectangle({{0.2, 0.4}}), 1.0}.piece());
    CHECK(s.has_pieces());
    CHECK_THROWS_AS(sobolev_norms(s, g, 2.0), DomainError);
    const std::vector<double> values = s.sample(g);
    std::size_t i = 0;
    for_each_node(g, [&](std::span<const double> x, double) {
        CHECK(values[i++] == doctest::Approx(s.value(x)).epsilon(1e-14));
    });
}

TEST_CASE("aligned grids are capped at four dimensions") {
    const PExponent p(2.0);
    const StripDomain d(1, {{0, 1}, {0, 1}, {0, 1}, {0, 1}});
    FunctionSum s(5);
    s.add(1.0, strip_trial(p, d, 1.0));
    CHECK_THROWS_AS(aligned_grid(s, strip_box(d, 1.0), 8), DimensionCapError);
}

TEST_CASE("lambda is a lower bound for random admissible trial functions") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (double pv : {1.5, 2.0, 3.0}) {
        const PExponent p(pv);
        const Rectangle r({{0.0, 1.0}, {0.0, 1.5}});
        const double lambda = lambda_closed_form(p, StripDomain(0, r.intervals()));
        for (int t = 0; t < 5; ++t) {
            const double c1 = coef(rng), c2 = coef(rng);
            TrialFunction f{[=](std::span<const double> x) {
                                const double b = x[0] * (1 - x[0]) * x[1] * (1.5 - x[1]);
                                return b * (1.0 + 0.5 * c1 * x[0] + 0.5 * c2 * x[1]);
                            },
                            {},
                            {}};
            CHECK(rayleigh(f, r, p, 16).quotient >= lambda);
        }
    }
}
