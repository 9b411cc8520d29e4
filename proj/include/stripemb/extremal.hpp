#pragma once

#include "stripemb/domain.hpp"
#include "stripemb/ptrig.hpp"
#include "stripemb/quad.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stripemb {

/// One factor sin_p(frequency * (x - origin)) restricted to [lo, hi].
struct AxisFactor {
    double lo;
    double hi;
    double origin;
    double frequency;
};

/// amplitude * prod_i sin_p(frequency_i (x_i - shift_i - origin_i)) on the
/// (shifted) support box, zero outside. Covers both the rectangle maximizer
/// and the strip family u_l together with their translates.
class ExtremalFunction {
public:
    ExtremalFunction(PExponent p, std::vector<AxisFactor> factors, double amplitude = 1.0,
                     std::vector<double> shifts = {});

    [[nodiscard]] const PExponent& exponent() const noexcept { return p_; }
    [[nodiscard]] std::size_t dim() const noexcept { return factors_.size(); }
    [[nodiscard]] double amplitude() const noexcept { return amplitude_; }
    [[nodiscard]] const std::vector<double>& shifts() const noexcept { return shifts_; }
    [[nodiscard]] const std::vector<AxisFactor>& factors() const noexcept { return factors_; }
    [[nodiscard]] Rectangle support_box() const;

    [[nodiscard]] double value(std::span<const double> x) const;
    void gradient(std::span<const double> x, std::span<double> out) const;

    /// Factor value and derivative on one axis (amplitude not applied).
    [[nodiscard]] SinCosP factor(std::size_t axis, double x) const;

    /// Length of one half-period of the sin_p factor on `axis`.
    [[nodiscard]] double half_period(std::size_t axis) const;

    /// Points where the factor on `axis` has a zero or an extremum, within
    /// the support. Quadrature cells aligned with these see only smooth
    /// pieces of |sin_p|^p and |cos_p|^p.
    [[nodiscard]] std::vector<double> breaks(std::size_t axis) const;

    [[nodiscard]] ExtremalFunction translated(std::span<const double> offset) const;
    [[nodiscard]] ExtremalFunction scaled(double c) const;

private:
    PExponent p_;
    std::vector<AxisFactor> factors_;
    double amplitude_;
    std::vector<double> shifts_;
};

/// u(x) = prod_i sin_p(pi_p (x_i - a_i) / (b_i - a_i)) on r.
ExtremalFunction rectangle_maximizer(const PExponent& p, const Rectangle& r);

/// u_l on D_l = (-l, l)^k x prod (a_i, b_i): free axes carry
/// sin_p(pi_p x_j / l) (a full period, vanishing at 0 and +-l), bounded axes
/// sin_p(pi_p (y_i - a_i) / (b_i - a_i)). Free axes come first.
ExtremalFunction strip_trial(const PExponent& p, const StripDomain& d, double l);

/// D_l as a box, free axes first.
Rectangle strip_box(const StripDomain& d, double l);

/// A compactly supported function without analytic structure: zero outside
/// `box`, evaluated pointwise.
struct CompactPiece {
    std::function<double(std::span<const double>)> f;
    Rectangle box;
};

/// Polynomial bump height * prod_i (4 (x_i - lo_i)(hi_i - x_i) / len_i^2)^3
/// on a box; C^2 across the box boundary.
struct Bump {
    Rectangle box;
    double height = 1.0;

    [[nodiscard]] double value(std::span<const double> x) const;
    void gradient(std::span<const double> x, std::span<double> out) const;
    [[nodiscard]] CompactPiece piece() const;
};

/// Linear combination of extremal functions and compact pieces.
class FunctionSum {
public:
    FunctionSum() = default;
    explicit FunctionSum(std::size_t dim) : dim_(dim) {}

    void add(double c, ExtremalFunction u);
    void add(double c, CompactPiece piece);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool empty() const noexcept { return extremal_.empty() && pieces_.empty(); }
    [[nodiscard]] bool has_pieces() const noexcept { return !pieces_.empty(); }

    [[nodiscard]] double value(std::span<const double> x) const;

    /// Values on every node of the grid, lexicographic order. Extremal terms
    /// are sampled per axis; pieces only on nodes inside their box.
    [[nodiscard]] std::vector<double> sample(const TensorGrid& grid) const;

    /// Breakpoints of all terms on `axis` (unsorted, may repeat).
    [[nodiscard]] std::vector<double> breaks(std::size_t axis) const;

    [[nodiscard]] const std::vector<std::pair<double, ExtremalFunction>>& extremal_terms() const noexcept {
        return extremal_;
    }
    [[nodiscard]] const std::vector<std::pair<double, CompactPiece>>& pieces() const noexcept { return pieces_; }

    /// The terms whose support meets the interior of `box`.
    [[nodiscard]] FunctionSum restricted_to(const Rectangle& box) const;

private:
    std::size_t dim_ = 0;
    std::vector<std::pair<double, ExtremalFunction>> extremal_;
    std::vector<std::pair<double, CompactPiece>> pieces_;
};

/// p-th powers of the two parts of the W^{1,p} norm.
struct SobolevNorms {
    double func_norm_p = 0.0;  // ||u||_p^p
    double grad_norm_p = 0.0;  // |||grad u|_{l^p}||_p^p

    [[nodiscard]] double w_norm(double p) const;
    [[nodiscard]] double lp_norm(double p) const;
};

/// Tensor quadrature of both parts for a sum of extremal functions, with
/// analytic gradients. Throws DomainError if the sum has compact pieces.
SobolevNorms sobolev_norms(const FunctionSum& u, const TensorGrid& grid, double p);

/// Grid on `box` whose cells are aligned with the breakpoints of `u` and no
/// wider than (box side) / resolution or (smallest sin_p half-period) /
/// resolution on each axis.
TensorGrid aligned_grid(const FunctionSum& u, const Rectangle& box, int resolution,
                        const QuadratureRule& rule = default_rule());

struct RayleighReport {
    double grad_norm_p = 0.0;
    double func_norm_p = 0.0;
    double quotient = 0.0;
    double quad_error = 0.0;  // |quotient(resolution) - quotient(resolution / 2)|
};

/// A trial function given pointwise. Without a gradient callback the
/// gradient is taken by central differences with step 1e-5 * (shortest side).
struct TrialFunction {
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    std::vector<std::vector<double>> breaks;  // optional, per axis
};

/// Rayleigh quotient |||grad u|_{l^p}||_p^p / ||u||_p^p over `box`.
/// resolution >= 8 is the number of cells per half-period of every sin_p
/// factor.
RayleighReport rayleigh(const ExtremalFunction& u, const Rectangle& box, const PExponent& p,
                        int resolution = 32);

/// Generic version; resolution is cells per box side.
RayleighReport rayleigh(const TrialFunction& u, const Rectangle& box, const PExponent& p,
                        int resolution = 32);

/// Closed forms for u_l:
///   ||u_l||_p^p = (2l/p)^k prod (b_i - a_i)/p
///   |||grad u_l|||_p^p = pi_p^p / (p' p^{n-k-1}) (2l/p)^k prod(b_i - a_i) (k/l^p + sum (b_i - a_i)^{-p})
SobolevNorms ul_closed_norms(const PExponent& p, const StripDomain& d, double l);

struct UlNormReport {
    SobolevNorms quadrature;
    SobolevNorms closed_form;
    double func_diff = 0.0;
    double grad_diff = 0.0;
    double quotient = 0.0;         // quadrature quotient
    double closed_quotient = 0.0;  // pi_p^p (p-1) (k/l^p + sum (b_i - a_i)^{-p})
    double quad_error = 0.0;
};

UlNormReport verify_ul_norms(const PExponent& p, const StripDomain& d, double l, int resolution = 32);

}  // namespace stripemb
