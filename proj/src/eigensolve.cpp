#include "stripemb/eigensolve.hpp"

#include "stripemb/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

namespace stripemb {

namespace {

inline double abs_pow(double v, double p) {
    const double a = std::abs(v);
    return p == 2.0 ? a * a : std::pow(a, p);
}

// s -> |s|^{p-2} s, with 0 at s = 0 for every p.
inline double signed_pow(double s, double p) {
    if (s == 0.0) {
        return 0.0;
    }
    return p == 2.0 ? s : std::copysign(std::pow(std::abs(s), p - 1.0), s);
}

struct Parts {
    double num = 0.0;
    double den = 0.0;
};

// Visits every axis-i edge of the padded grid as (left, right) flat indices;
// -1 stands for a boundary node.
template <typename Fn>
void for_each_edge(const std::vector<std::size_t>& shape, std::size_t axis, std::size_t stride, Fn&& fn) {
    const std::size_t total = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    const std::size_t n = shape[axis];
    const std::size_t block = n * stride;
    for (std::size_t outer = 0; outer < total; outer += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            const std::size_t base = outer + inner;
            fn(std::ptrdiff_t{-1}, static_cast<std::ptrdiff_t>(base));
            for (std::size_t j = 0; j + 1 < n; ++j) {
                fn(static_cast<std::ptrdiff_t>(base + j * stride),
                   static_cast<std::ptrdiff_t>(base + (j + 1) * stride));
            }
            fn(static_cast<std::ptrdiff_t>(base + (n - 1) * stride), std::ptrdiff_t{-1});
        }
    }
}

Parts rayleigh_parts(const GridFunction& u, double p) {
    const auto& v = u.values();
    Parts out;
    for (double x : v) {
        out.den += abs_pow(x, p);
    }
    for (std::size_t axis = 0; axis < u.dim(); ++axis) {
        const double inv_h = 1.0 / u.spacing()[axis];
        double sum = 0.0;
        for_each_edge(u.shape(), axis, u.stride(axis), [&](std::ptrdiff_t a, std::ptrdiff_t b) {
            const double ua = a < 0 ? 0.0 : v[static_cast<std::size_t>(a)];
            const double ub = b < 0 ? 0.0 : v[static_cast<std::size_t>(b)];
            sum += abs_pow((ub - ua) * inv_h, p);
        });
        out.num += sum;
    }
    const double vol = u.cell_volume();
    out.num *= vol;
    out.den *= vol;
    return out;
}

// Gradient of the quotient; also returns the quotient.
double rayleigh_with_gradient(const GridFunction& u, double p, std::vector<double>& grad) {
    const Parts parts = rayleigh_parts(u, p);
    if (!(parts.den > 0.0)) {
        throw ZeroFunctionError("discrete Rayleigh quotient of the zero function");
    }
    const double q = parts.num / parts.den;
    const auto& v = u.values();
    const double vol = u.cell_volume();
    grad.assign(v.size(), 0.0);
    for (std::size_t axis = 0; axis < u.dim(); ++axis) {
        const double inv_h = 1.0 / u.spacing()[axis];
        for_each_edge(u.shape(), axis, u.stride(axis), [&](std::ptrdiff_t a, std::ptrdiff_t b) {
            const double ua = a < 0 ? 0.0 : v[static_cast<std::size_t>(a)];
            const double ub = b < 0 ? 0.0 : v[static_cast<std::size_t>(b)];
            const double flux = p * signed_pow((ub - ua) * inv_h, p) * inv_h;
            if (b >= 0) {
                grad[static_cast<std::size_t>(b)] += flux;
            }
            if (a >= 0) {
                grad[static_cast<std::size_t>(a)] -= flux;
            }
        });
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        grad[i] = (grad[i] * vol - q * p * signed_pow(v[i], p) * vol) / parts.den;
    }
    return q;
}

void normalize_lp(std::vector<double>& v, double p, double vol) {
    double s = 0.0;
    for (double x : v) {
        s += abs_pow(x, p);
    }
    const double scale = std::pow(s * vol, -1.0 / p);
    for (double& x : v) {
        x *= scale;
    }
}

// Inverse of the discrete Dirichlet Laplacian -sum_i D_i^+ D_i^- via the
// sine eigenbasis on each axis.
class LaplacianInverse {
public:
    explicit LaplacianInverse(const GridFunction& u) : shape_(u.shape()) {
        for (std::size_t d = 0; d < shape_.size(); ++d) {
            const std::size_t n = shape_[d];
            const double h = u.spacing()[d];
            std::vector<double> basis(n * n);
            const double norm = std::sqrt(2.0 / static_cast<double>(n + 1));
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = 0; k < n; ++k) {
                    basis[j * n + k] = norm * std::sin(std::numbers::pi * static_cast<double>((j + 1) * (k + 1)) /
                                                       static_cast<double>(n + 1));
                }
            }
            std::vector<double> eig(n);
            for (std::size_t k = 0; k < n; ++k) {
                const double s = std::sin(0.5 * std::numbers::pi * static_cast<double>(k + 1) /
                                          static_cast<double>(n + 1));
                eig[k] = 4.0 * s * s / (h * h);
            }
            basis_.push_back(std::move(basis));
            eig_.push_back(std::move(eig));
            strides_.push_back(u.stride(d));
        }
    }

    void apply(std::vector<double>& v) const {
        for (std::size_t d = 0; d < shape_.size(); ++d) {
            transform(v, d);
        }
        // v now holds coefficients in the product sine basis.
        const std::size_t n_dim = shape_.size();
        std::vector<std::size_t> idx(n_dim, 0);
        for (std::size_t flat = 0; flat < v.size(); ++flat) {
            double mu = 0.0;
            for (std::size_t d = 0; d < n_dim; ++d) {
                mu += eig_[d][idx[d]];
            }
            v[flat] /= mu;
            for (std::size_t d = n_dim; d-- > 0;) {
                if (++idx[d] < shape_[d]) {
                    break;
                }
                idx[d] = 0;
            }
        }
        // The sine basis is symmetric and orthonormal, so it is its own inverse.
        for (std::size_t d = 0; d < shape_.size(); ++d) {
            transform(v, d);
        }
    }

private:
    void transform(std::vector<double>& v, std::size_t d) const {
        const std::size_t n = shape_[d];
        const std::size_t stride = strides_[d];
        const std::size_t block = n * stride;
        const auto& b = basis_[d];
        std::vector<double> line(n);
        std::vector<double> out(n);
        for (std::size_t outer = 0; outer < v.size(); outer += block) {
            for (std::size_t inner = 0; inner < stride; ++inner) {
                const std::size_t base = outer + inner;
                for (std::size_t j = 0; j < n; ++j) {
                    line[j] = v[base + j * stride];
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double s = 0.0;
                    const double* row = &b[k * n];
                    for (std::size_t j = 0; j < n; ++j) {
                        s += row[j] * line[j];
                    }
                    out[k] = s;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    v[base + k * stride] = out[k];
                }
            }
        }
    }

    std::vector<std::size_t> shape_;
    std::vector<std::vector<double>> basis_;
    std::vector<std::vector<double>> eig_;
    std::vector<std::size_t> strides_;
};

}  // namespace

// --- GridFunction ------------------------------------------------------------

GridFunction::GridFunction(Rectangle box, std::vector<std::size_t> shape)
    : GridFunction(box, shape,
                   std::vector<double>(std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                                       std::multiplies<>()),
                                       0.0)) {}

GridFunction::GridFunction(Rectangle box, std::vector<std::size_t> shape, std::vector<double> values)
    : box_(std::move(box)), shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_.size() != box_.dim()) {
        throw DomainError("grid shape must have one entry per box axis");
    }
    std::size_t total = 1;
    for (std::size_t d = 0; d < shape_.size(); ++d) {
        if (shape_[d] < 1) {
            throw DomainError("grid shape entries must be >= 1");
        }
        total *= shape_[d];
        spacing_.push_back(box_[d].length() / static_cast<double>(shape_[d] + 1));
    }
    if (values_.size() != total) {
        std::ostringstream os;
        os << "grid function has " << values_.size() << " values, shape needs " << total;
        throw DomainError(os.str());
    }
}

double GridFunction::cell_volume() const noexcept {
    double v = 1.0;
    for (double h : spacing_) {
        v *= h;
    }
    return v;
}

std::size_t GridFunction::stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t d = axis + 1; d < shape_.size(); ++d) {
        s *= shape_[d];
    }
    return s;
}

std::vector<double> GridFunction::node(std::size_t flat) const {
    std::vector<double> x(dim());
    for (std::size_t d = dim(); d-- > 0;) {
        const std::size_t i = flat % shape_[d];
        flat /= shape_[d];
        x[d] = box_[d].lo + static_cast<double>(i + 1) * spacing_[d];
    }
    return x;
}

// --- quotient ----------------------------------------------------------------

double discrete_rayleigh(const GridFunction& u, const PExponent& p) {
    const Parts parts = rayleigh_parts(u, p.p());
    if (!(parts.den > 0.0)) {
        throw ZeroFunctionError("discrete Rayleigh quotient of the zero function");
    }
    return parts.num / parts.den;
}

std::vector<double> discrete_rayleigh_gradient(const GridFunction& u, const PExponent& p) {
    std::vector<double> g;
    rayleigh_with_gradient(u, p.p(), g);
    return g;
}

EigenResult first_eigenpair(const PExponent& p, const Rectangle& box, std::vector<std::size_t> shape,
                            const EigenOptions& options) {
    if (!(options.tol > 0.0)) {
        throw DomainError("eigen solver tolerance must be positive");
    }
    for (std::size_t n : shape) {
        if (n < 7) {
            throw DomainError("eigen solver needs at least 7 interior nodes per axis");
        }
    }
    const double pp = p.p();
    GridFunction u(box, std::move(shape));
    std::fill(u.values().begin(), u.values().end(), 1.0);
    const double vol = u.cell_volume();
    normalize_lp(u.values(), pp, vol);

    std::optional<LaplacianInverse> precond;
    if (options.sobolev_gradient) {
        precond.emplace(u);
    }

    std::vector<double> grad;
    std::vector<double> dir;
    GridFunction trial = u;
    double q = rayleigh_with_gradient(u, pp, grad);

    EigenResult res{q, u, 0, 0.0, {q}};
    double residual = 1.0;
    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        dir = grad;
        if (precond) {
            precond->apply(dir);
            for (double& d : dir) {
                d /= pp * vol;
            }
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < dir.size(); ++i) {
            dir[i] = -dir[i];
            slope += grad[i] * dir[i];
        }
        if (!(slope < 0.0)) {
            residual = 0.0;
            res.iterations = iter - 1;
            break;
        }

        double step = options.initial_step;
        double q_new = q;
        bool accepted = false;
        for (int k = 0; k < 80; ++k) {
            auto& tv = trial.values();
            for (std::size_t i = 0; i < tv.size(); ++i) {
                tv[i] = std::abs(u.values()[i] + step * dir[i]);
            }
            const Parts parts = rayleigh_parts(trial, pp);
            if (parts.den > 0.0) {
                q_new = parts.num / parts.den;
                if (q_new <= q + options.armijo_slope * step * slope) {
                    accepted = true;
                    break;
                }
            }
            step *= options.shrink;
        }
        if (!accepted) {
            // No representable decrease left along the descent direction.
            residual = 0.0;
            res.iterations = iter - 1;
            break;
        }
        normalize_lp(trial.values(), pp, vol);
        std::swap(u, trial);
        residual = std::abs(q - q_new) / q_new;
        q = rayleigh_with_gradient(u, pp, grad);
        res.trace.push_back(q);
        res.iterations = iter;
        if (residual < options.tol) {
            break;
        }
        if (iter == options.max_iter) {
            std::ostringstream os;
            os << "eigen solver stopped after " << iter << " iterations, relative change " << residual;
            throw EigenNonConvergence(os.str(), residual, u);
        }
    }
    res.lambda_h = q;
    res.eigenfunction = std::move(u);
    res.residual = residual;
    return res;
}

double eigenfunction_error(const EigenResult& res, const PExponent& p) {
    const GridFunction& phi = res.eigenfunction;
    const ExtremalFunction u = rectangle_maximizer(p, phi.box());
    std::vector<double> s(phi.size());
    double ss = 0.0;
    double es = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        s[i] = u.value(phi.node(i));
        ss += s[i] * s[i];
        es += phi.values()[i] * s[i];
    }
    const double c = es / ss;
    double err = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        err = std::max(err, std::abs(phi.values()[i] - c * s[i]));
    }
    return err;
}

}  // namespace stripemb
