#include "stripemb/ptrig.hpp"

#include "stripemb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

namespace stripemb {

namespace {

constexpr double kPi = std::numbers::pi;

void require_exponent(double p) {
    if (!std::isfinite(p) || !(p > 1.0)) {
        std::ostringstream os;
        os << "exponent must be a finite real > 1, got " << p;
        throw DomainError(os.str());
    }
}

// Tanh-sinh quadrature of a bounded integrand over [a, b]:
// x = c + r tanh(u), u = (pi/2) sinh(tau). Levels halve the step and reuse
// all previous nodes; stops once two levels agree to ~1e-14.
template <typename F>
double tanh_sinh(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    if (r == 0.0) {
        return 0.0;
    }

    auto term = [&](double tau) {
        const double u = 0.5 * kPi * std::sinh(tau);
        const double e = std::exp(-2.0 * std::abs(u));
        if (e == 0.0) {
            return 0.0;
        }
        const double denom = 1.0 + e;
        const double th = std::copysign((1.0 - e) / denom, u);
        // dx/dtau = r (pi/2) cosh(tau) sech(u)^2
        const double weight = r * 0.5 * kPi * std::cosh(tau) * 4.0 * e / (denom * denom);
        return weight * f(c + r * th);
    };

    // Nodes past this are within one ulp of the endpoints.
    constexpr double kTauMax = 3.2;

    double h = 0.5;
    double sum = term(0.0);
    for (double tau = h; tau <= kTauMax; tau += h) {
        sum += term(tau) + term(-tau);
    }
    double estimate = h * sum;

    constexpr int kMaxLevel = 10;
    for (int level = 1; level <= kMaxLevel; ++level) {
        h *= 0.5;
        double added = 0.0;
        for (double tau = h; tau <= kTauMax; tau += 2.0 * h) {
            added += term(tau) + term(-tau);
        }
        sum += added;
        const double next = h * sum;
        const double change = std::abs(next - estimate);
        estimate = next;
        if (level >= 2 && change <= 1e-14 * std::max(1.0, std::abs(next))) {
            return estimate;
        }
    }
    throw ConvergenceError("tanh-sinh quadrature did not settle at its node budget",
                           std::abs(estimate));
}

// F(t) by quadrature. The part of the range where 1 - s^p < 1/2 is mapped
// to w = (1 - s^p)^{1/p'}, which removes the endpoint singularity:
//   \int_{t}^{1} (1 - s^p)^{-1/p} ds = \int_0^{w(t)} (p'/p) (1 - w^{p'})^{-1/p'} dw.
double arc_quadrature(double p, double t) {
    const double pc = p / (p - 1.0);
    const double t_split = std::pow(0.5, 1.0 / p);
    auto lower = [p](double s) { return std::pow(1.0 - std::pow(s, p), -1.0 / p); };
    if (t <= t_split) {
        return tanh_sinh(lower, 0.0, t);
    }
    auto upper = [p, pc](double w) { return (pc / p) * std::pow(1.0 - std::pow(w, pc), -1.0 / pc); };
    const double w_split = std::pow(0.5, 1.0 / pc);
    const double w_t = std::pow(-std::expm1(p * std::log(t)), 1.0 / pc);
    return tanh_sinh(lower, 0.0, t_split) + tanh_sinh(upper, w_t, w_split);
}

// Safeguarded Newton iteration for g(v) = target with g increasing and
// convex on [lo, hi] and the root inside. `eval` returns {g(v), g'(v)}.
template <typename Eval>
double solve_increasing(Eval&& eval, double target, double lo, double hi, double start) {
    double v = std::clamp(start, lo, hi);
    for (int iter = 0; iter < 100; ++iter) {
        const auto [g, dg] = eval(v);
        const double r = g - target;
        if (r == 0.0) {
            return v;
        }
        if (r > 0.0) {
            hi = v;
        } else {
            lo = v;
        }
        double next = v - r / dg;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - v) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(v) ||
            hi - lo <= std::numeric_limits<double>::min()) {
            return next;
        }
        v = next;
    }
    return v;
}

// sin_p and cos_p on [0, pi_p/2].
SinCosP first_quarter(const PExponent& e, double x) {
    const double p = e.p();
    if (x <= e.split_arc()) {
        const double t_split = std::pow(0.5, 1.0 / p);
        auto eval = [p](double t) {
            return std::pair{detail::arc_series_lower(p, t), std::pow(1.0 - std::pow(t, p), -1.0 / p)};
        };
        const double t = solve_increasing(eval, x, 0.0, t_split, x);
        return {t, std::pow(1.0 - std::pow(t, p), 1.0 / p)};
    }
    const double pc = e.conj();
    const double y = e.half_pi_p() - x;
    const double w_split = std::pow(0.5, 1.0 / pc);
    auto eval = [p, pc](double w) {
        const double z = std::pow(w, pc);
        return std::pair{detail::arc_tail_series(p, w), (pc / p) * std::pow(1.0 - z, -1.0 / pc)};
    };
    const double w = solve_increasing(eval, y, 0.0, w_split, y * p / pc);
    const double z = std::pow(w, pc);
    return {std::exp(std::log1p(-z) / p), std::pow(w, 1.0 / (p - 1.0))};
}

}  // namespace

namespace detail {

double arc_series_lower(double p, double t) {
    // \sum_n (1/p)_n / n! * t^{pn+1} / (pn + 1)
    const double w = std::pow(t, p);
    double coeff = 1.0;
    double power = 1.0;
    double sum = 0.0;
    for (int n = 0; n < 5000; ++n) {
        const double term = coeff * power / (p * n + 1.0);
        sum += term;
        if (term <= 1e-17 * sum) {
            break;
        }
        coeff *= (n + 1.0 / p) / (n + 1.0);
        power *= w;
    }
    return t * sum;
}

double arc_tail_series(double p, double w) {
    // With z = 1 - t^p = w^{p'}:
    //   \int_t^1 (1 - s^p)^{-1/p} ds = (1/p) \sum_n (1/p')_n / n! * z^{n + 1/p'} / (n + 1/p')
    const double pc = p / (p - 1.0);
    const double a = 1.0 / pc;
    const double z = std::pow(w, pc);
    double coeff = 1.0;
    double power = 1.0;
    double sum = 0.0;
    for (int n = 0; n < 5000; ++n) {
        const double term = coeff * power / (n + a);
        sum += term;
        if (term <= 1e-17 * sum) {
            break;
        }
        coeff *= (n + a) / (n + 1.0);
        power *= z;
    }
    return w * sum / p;
}

}  // namespace detail

PExponent::PExponent(double p) : p_(p) {
    require_exponent(p);
    p_conj_ = p / (p - 1.0);
    pi_p_ = pi_p_closed_form(p);
    split_arc_ = detail::arc_series_lower(p, std::pow(0.5, 1.0 / p));
}

PExponent PExponent::checked(double p) {
    PExponent e(p);
    const double quad = pi_p_quadrature(p);
    if (std::abs(quad - e.pi_p()) > 1e-10) {
        std::ostringstream os;
        os << "pi_p closed form and quadrature disagree for p = " << p << ": " << e.pi_p()
           << " vs " << quad;
        throw ConvergenceError(os.str(), std::abs(quad - e.pi_p()));
    }
    return e;
}

double pi_p_quadrature(double p) {
    require_exponent(p);
    return 2.0 * arc_quadrature(p, 1.0);
}

double pi_p_closed_form(double p) {
    require_exponent(p);
    return 2.0 * kPi / (p * std::sin(kPi / p));
}

double arc_integral(const PExponent& p, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        std::ostringstream os;
        os << "arc integral argument must lie in [0, 1], got " << t;
        throw DomainError(os.str());
    }
    if (t == 0.0) {
        return 0.0;
    }
    return arc_quadrature(p.p(), t);
}

SinCosP sincos_p(const PExponent& p, double x) {
    if (!std::isfinite(x)) {
        throw DomainError("sin_p/cos_p argument must be finite");
    }
    const double period = 2.0 * p.pi_p();
    double r = std::fmod(x, period);
    if (r > p.pi_p()) {
        r -= period;
    } else if (r < -p.pi_p()) {
        r += period;
    }
    const double sign = r < 0.0 ? -1.0 : 1.0;
    r = std::abs(r);
    double cos_sign = 1.0;
    if (r > p.half_pi_p()) {
        r = p.pi_p() - r;
        cos_sign = -1.0;
    }
    r = std::clamp(r, 0.0, p.half_pi_p());
    const SinCosP q = first_quarter(p, r);
    return {sign * q.sin, cos_sign * q.cos};
}

double sin_p(const PExponent& p, double x) { return sincos_p(p, x).sin; }

double cos_p(const PExponent& p, double x) { return sincos_p(p, x).cos; }

}  // namespace stripemb
