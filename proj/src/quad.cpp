#include "stripemb/quad.hpp"

#include "stripemb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace stripemb {

QuadratureRule QuadratureRule::gauss_legendre(int n) {
    if (n < 1) {
        throw DomainError("Gauss-Legendre rule needs at least one node");
    }
    QuadratureRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Three-term recurrence for P_n(x) and P_n'(x).
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        if (n == 1) {
            x = 0.0;
            dp = 1.0;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

const QuadratureRule& default_rule() {
    static const QuadratureRule rule = QuadratureRule::gauss_legendre(16);
    return rule;
}

Rectangle::Rectangle(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty()) {
        throw DomainError("rectangle needs at least one interval");
    }
    for (const auto& iv : intervals_) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
            std::ostringstream os;
            os << "invalid interval (" << iv.lo << ", " << iv.hi << ")";
            throw DomainError(os.str());
        }
    }
}

double Rectangle::volume() const noexcept {
    double v = 1.0;
    for (const auto& iv : intervals_) {
        v *= iv.length();
    }
    return v;
}

bool Rectangle::contains(std::span<const double> x) const noexcept {
    if (x.size() != intervals_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < intervals_[i].lo || x[i] > intervals_[i].hi) {
            return false;
        }
    }
    return true;
}

bool Rectangle::interior_disjoint(const Rectangle& other) const {
    if (other.dim() != dim()) {
        throw DomainError("rectangles of different dimension");
    }
    for (std::size_t i = 0; i < dim(); ++i) {
        if (intervals_[i].hi <= other[i].lo || other[i].hi <= intervals_[i].lo) {
            return true;
        }
    }
    return false;
}

double integrate_1d(const std::function<double(double)>& f, double a, double b, int cells,
                    const QuadratureRule& rule) {
    if (!(a < b)) {
        throw DomainError("integrate_1d requires a < b");
    }
    if (cells < 1) {
        throw DomainError("integrate_1d requires at least one cell");
    }
    const AxisNodes nodes = axis_nodes(a, b, cells, rule);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.x.size(); ++i) {
        sum += nodes.w[i] * f(nodes.x[i]);
    }
    return sum;
}

Integral integrate_1d_estimate(const std::function<double(double)>& f, double a, double b,
                               int cells, const QuadratureRule& rule) {
    const double coarse = integrate_1d(f, a, b, cells, rule);
    const double fine = integrate_1d(f, a, b, 2 * cells, rule);
    return {coarse, std::abs(fine - coarse)};
}

AxisNodes axis_nodes(double a, double b, int cells, const QuadratureRule& rule) {
    if (!(a < b) || cells < 1) {
        throw DomainError("axis_nodes requires a < b and cells >= 1");
    }
    AxisNodes out;
    out.x.reserve(static_cast<std::size_t>(cells) * rule.nodes.size());
    out.w.reserve(out.x.capacity());
    const double h = (b - a) / cells;
    for (int c = 0; c < cells; ++c) {
        const double lo = a + c * h;
        const double hi = (c + 1 == cells) ? b : a + (c + 1) * h;
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            out.x.push_back(mid + half * rule.nodes[i]);
            out.w.push_back(half * rule.weights[i]);
        }
    }
    return out;
}

AxisNodes axis_nodes(std::span<const double> breaks, double max_cell_width, const QuadratureRule& rule) {
    if (breaks.size() < 2 || !(max_cell_width > 0.0)) {
        throw DomainError("axis_nodes needs two or more breaks and a positive cell width");
    }
    AxisNodes out;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s];
        const double b = breaks[s + 1];
        if (!(a < b)) {
            if (a == b) {
                continue;
            }
            throw DomainError("axis breaks must be nondecreasing");
        }
        const int cells = std::max(1, static_cast<int>(std::ceil((b - a) / max_cell_width - 1e-9)));
        AxisNodes seg = axis_nodes(a, b, cells, rule);
        out.x.insert(out.x.end(), seg.x.begin(), seg.x.end());
        out.w.insert(out.w.end(), seg.w.begin(), seg.w.end());
    }
    return out;
}

TensorGrid tensor_grid(const Rectangle& box, int cells_per_axis, const QuadratureRule& rule) {
    if (box.dim() > kMaxQuadratureDim) {
        std::ostringstream os;
        os << "tensor quadrature supports at most " << kMaxQuadratureDim << " dimensions, got "
           << box.dim();
        throw DimensionCapError(os.str());
    }
    if (cells_per_axis < 1) {
        throw DomainError("cells_per_axis must be >= 1");
    }
    TensorGrid grid;
    grid.reserve(box.dim());
    for (const auto& iv : box.intervals()) {
        grid.push_back(axis_nodes(iv.lo, iv.hi, cells_per_axis, rule));
    }
    return grid;
}

double integrate_grid(const std::function<double(std::span<const double>)>& f, const TensorGrid& grid) {
    double sum = 0.0;
    for_each_node(grid, [&](std::span<const double> x, double w) { sum += w * f(x); });
    return sum;
}

double integrate_tensor(const std::function<double(std::span<const double>)>& f, const Rectangle& box,
                        int cells_per_axis, const QuadratureRule& rule) {
    return integrate_grid(f, tensor_grid(box, cells_per_axis, rule));
}

Integral integrate_tensor_estimate(const std::function<double(std::span<const double>)>& f,
                                   const Rectangle& box, int cells_per_axis,
                                   const QuadratureRule& rule) {
    const double coarse = integrate_tensor(f, box, cells_per_axis, rule);
    const double fine = integrate_tensor(f, box, 2 * cells_per_axis, rule);
    return {coarse, std::abs(fine - coarse)};
}

}  // namespace stripemb
