#pragma once

// Generalized p-trigonometric functions.
//
// sin_p is the inverse of F(t) = \int_0^t (1 - s^p)^{-1/p} ds on [0, pi_p/2],
// extended to [pi_p/2, pi_p] by reflection about pi_p/2, to [-pi_p, 0] as an
// odd function and to the real line with period 2 pi_p. cos_p = sin_p'.
// For p = 2 these are the ordinary sin, cos and pi.

namespace stripemb {

/// A Lebesgue exponent p in (1, inf) together with its conjugate and pi_p.
class PExponent {
public:
    explicit PExponent(double p);

    /// Same as the constructor, but additionally checks the cached pi_p
    /// against the singular quadrature and throws ConvergenceError if they
    /// disagree by more than 1e-10.
    static PExponent checked(double p);

    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double conj() const noexcept { return p_conj_; }
    [[nodiscard]] double pi_p() const noexcept { return pi_p_; }
    [[nodiscard]] double half_pi_p() const noexcept { return 0.5 * pi_p_; }

    // Boundary between the two series branches used by sin_p; see ptrig.cpp.
    [[nodiscard]] double split_arc() const noexcept { return split_arc_; }

private:
    double p_;
    double p_conj_;
    double pi_p_;
    double split_arc_;
};

struct SinCosP {
    double sin;
    double cos;
};

/// 2 \int_0^1 (1 - s^p)^{-1/p} ds by double-exponential quadrature.
/// Throws DomainError for p <= 1 and ConvergenceError if the node budget is
/// exhausted before the estimate settles.
double pi_p_quadrature(double p);

/// 2 pi / (p sin(pi / p)).
double pi_p_closed_form(double p);

/// F(t) = \int_0^t (1 - s^p)^{-1/p} ds for t in [0, 1], by double-exponential
/// quadrature. F(1) = pi_p / 2.
double arc_integral(const PExponent& p, double t);

double sin_p(const PExponent& p, double x);
double cos_p(const PExponent& p, double x);

/// Both values from one inversion. cos_p is accurate in absolute terms near
/// the zeros of cos_p as well.
SinCosP sincos_p(const PExponent& p, double x);

namespace detail {

// Series forms of the arc integral used by the inverse. Exposed for tests.
//   lower: F(t) for t^p <= 1/2
//   upper: pi_p/2 - F(t) written in w = (1 - t^p)^{1/p'}, for 1 - t^p <= 1/2
double arc_series_lower(double p, double t);
double arc_tail_series(double p, double w);

}  // namespace detail

}  // namespace stripemb
