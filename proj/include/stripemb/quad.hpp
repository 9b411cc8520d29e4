#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stripemb {

/// Quadrature rule on the reference interval [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;  // number of nodes

    /// n-point Gauss-Legendre rule, exact for polynomials of degree 2n - 1.
    static QuadratureRule gauss_legendre(int n);

    [[nodiscard]] int exact_degree() const noexcept { return 2 * order - 1; }
};

/// 16-point Gauss-Legendre, the default per-cell rule.
const QuadratureRule& default_rule();

struct Interval {
    double lo;
    double hi;

    [[nodiscard]] double length() const noexcept { return hi - lo; }
};

/// Axis-aligned box prod (a_i, b_i), every a_i < b_i finite.
class Rectangle {
public:
    explicit Rectangle(std::vector<Interval> intervals);

    [[nodiscard]] std::size_t dim() const noexcept { return intervals_.size(); }
    [[nodiscard]] const Interval& operator[](std::size_t i) const { return intervals_[i]; }
    [[nodiscard]] const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    [[nodiscard]] double volume() const noexcept;
    [[nodiscard]] bool contains(std::span<const double> x) const noexcept;

    /// Closed boxes share at most a boundary.
    [[nodiscard]] bool interior_disjoint(const Rectangle& other) const;

private:
    std::vector<Interval> intervals_;
};

/// A value together with an estimate of its absolute error.
struct Integral {
    double value = 0.0;
    double error = 0.0;
};

inline constexpr std::size_t kMaxQuadratureDim = 4;

/// Composite rule on `cells` equal subintervals of [a, b].
double integrate_1d(const std::function<double(double)>& f, double a, double b, int cells,
                    const QuadratureRule& rule = default_rule());

/// As integrate_1d; the error is |I(cells) - I(2 cells)|.
Integral integrate_1d_estimate(const std::function<double(double)>& f, double a, double b,
                               int cells, const QuadratureRule& rule = default_rule());

// --- tensor-product grids -------------------------------------------------

struct AxisNodes {
    std::vector<double> x;
    std::vector<double> w;
};

using TensorGrid = std::vector<AxisNodes>;

AxisNodes axis_nodes(double a, double b, int cells, const QuadratureRule& rule = default_rule());

/// Nodes on [breaks.front(), breaks.back()] with every break on a cell
/// boundary; each segment is split into equal cells no wider than
/// `max_cell_width`.
AxisNodes axis_nodes(std::span<const double> breaks, double max_cell_width,
                     const QuadratureRule& rule = default_rule());

TensorGrid tensor_grid(const Rectangle& box, int cells_per_axis,
                       const QuadratureRule& rule = default_rule());

/// Calls fn(point, weight) for every node of the grid in lexicographic
/// order (last axis fastest).
template <typename Fn>
void for_each_node(const TensorGrid& grid, Fn&& fn) {
    const std::size_t n = grid.size();
    for (const auto& axis : grid) {
        if (axis.x.empty()) {
            return;
        }
    }
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> point(n);
    while (true) {
        double weight = 1.0;
        for (std::size_t d = 0; d < n; ++d) {
            point[d] = grid[d].x[idx[d]];
            weight *= grid[d].w[idx[d]];
        }
        fn(std::span<const double>(point), weight);
        std::size_t d = n;
        while (d > 0) {
            --d;
            if (++idx[d] < grid[d].x.size()) {
                break;
            }
            idx[d] = 0;
            if (d == 0) {
                return;
            }
        }
        if (n == 0) {
            return;
        }
    }
}

/// Multi-index variant: fn(index, weight), used by callers that precompute
/// per-axis samples.
template <typename Fn>
void for_each_index(const TensorGrid& grid, Fn&& fn) {
    const std::size_t n = grid.size();
    for (const auto& axis : grid) {
        if (axis.x.empty()) {
            return;
        }
    }
    std::vector<std::size_t> idx(n, 0);
    while (n > 0) {
        double weight = 1.0;
        for (std::size_t d = 0; d < n; ++d) {
            weight *= grid[d].w[idx[d]];
        }
        fn(std::span<const std::size_t>(idx), weight);
        std::size_t d = n;
        while (d > 0) {
            --d;
            if (++idx[d] < grid[d].x.size()) {
                break;
            }
            idx[d] = 0;
            if (d == 0) {
                return;
            }
        }
    }
}

double integrate_grid(const std::function<double(std::span<const double>)>& f, const TensorGrid& grid);

/// Tensor-product composite quadrature over a box of dimension <= 4.
double integrate_tensor(const std::function<double(std::span<const double>)>& f, const Rectangle& box,
                        int cells_per_axis, const QuadratureRule& rule = default_rule());

/// As integrate_tensor; the error is the change under doubling cells_per_axis.
Integral integrate_tensor_estimate(const std::function<double(std::span<const double>)>& f,
                                   const Rectangle& box, int cells_per_axis,
                                   const QuadratureRule& rule = default_rule());

}  // namespace stripemb
