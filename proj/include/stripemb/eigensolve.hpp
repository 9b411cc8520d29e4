#pragma once

#include "stripemb/errors.hpp"
#include "stripemb/ptrig.hpp"
#include "stripemb/quad.hpp"

#include <cstddef>
#include <vector>

namespace stripemb {

/// Samples at the interior nodes of a uniform grid on a box; boundary
/// values are implicitly zero. Node i on axis d sits at a_d + (i + 1) h_d.
class GridFunction {
public:
    GridFunction(Rectangle box, std::vector<std::size_t> shape);
    GridFunction(Rectangle box, std::vector<std::size_t> shape, std::vector<double> values);

    [[nodiscard]] const Rectangle& box() const noexcept { return box_; }
    [[nodiscard]] const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    [[nodiscard]] const std::vector<double>& spacing() const noexcept { return spacing_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::vector<double>& values() noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return shape_.size(); }

    /// Product of the spacings (cell volume).
    [[nodiscard]] double cell_volume() const noexcept;

    /// Coordinates of the node with flat index `flat`.
    [[nodiscard]] std::vector<double> node(std::size_t flat) const;

    /// Flat-index stride of `axis` (last axis contiguous).
    [[nodiscard]] std::size_t stride(std::size_t axis) const;

private:
    Rectangle box_;
    std::vector<std::size_t> shape_;
    std::vector<double> spacing_;
    std::vector<double> values_;
};

/// Discrete Rayleigh quotient with forward differences per axis and zero
/// Dirichlet padding:
///   sum_i sum_edges |(u_{x+e_i} - u_x) / h_i|^p |h| / sum_x |u_x|^p |h|.
/// Throws ZeroFunctionError if u vanishes identically.
double discrete_rayleigh(const GridFunction& u, const PExponent& p);

/// Analytic gradient of discrete_rayleigh with respect to the node values.
std::vector<double> discrete_rayleigh_gradient(const GridFunction& u, const PExponent& p);

struct EigenOptions {
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    // Descend along the gradient taken in the discrete H_0^1 inner product
    // (Euclidean gradient preconditioned by the inverse Dirichlet Laplacian).
    // Without it the iteration count grows like the squared grid size.
    bool sobolev_gradient = true;
    double initial_step = 1.0;
    double shrink = 0.5;
    double armijo_slope = 1e-4;
};

struct EigenResult {
    double lambda_h = 0.0;
    GridFunction eigenfunction;
    std::size_t iterations = 0;
    double residual = 0.0;  // last relative change of the quotient
    std::vector<double> trace;  // quotient after every accepted step, starting value first
};

class EigenNonConvergence : public ConvergenceError {
public:
    EigenNonConvergence(const std::string& what, double residual, GridFunction last)
        : ConvergenceError(what, residual), last_(std::move(last)) {}

    [[nodiscard]] const GridFunction& last_iterate() const noexcept { return last_; }

private:
    GridFunction last_;
};

/// First Dirichlet eigenpair of the discrete pseudo-p-Laplacian
/// sum_i d_i(|d_i u|^{p-2} d_i u) on `box` by projected, normalized descent on
/// the discrete Rayleigh quotient from the all-ones start. The eigenfunction
/// is returned positive with unit discrete L^p norm.
EigenResult first_eigenpair(const PExponent& p, const Rectangle& box, std::vector<std::size_t> shape,
                            const EigenOptions& options = {});

/// max_x |phi_x - c u_x| where u samples the closed-form rectangle maximizer
/// at the nodes and c > 0 is the least-squares optimal scale.
double eigenfunction_error(const EigenResult& res, const PExponent& p);

}  // namespace stripemb
