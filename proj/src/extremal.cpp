#include "stripemb/extremal.hpp"

#include "stripemb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stripemb {

namespace {

inline double abs_pow(double v, double p) {
    const double a = std::abs(v);
    return p == 2.0 ? a * a : std::pow(a, p);
}

std::vector<double> merged_breaks(double lo, double hi, std::vector<double> inner) {
    std::vector<double> out{lo};
    std::sort(inner.begin(), inner.end());
    const double eps = 1e-12 * std::max(1.0, hi - lo);
    for (double b : inner) {
        if (b > out.back() + eps && b < hi - eps) {
            out.push_back(b);
        }
    }
    out.push_back(hi);
    return out;
}

struct AxisSamples {
    std::vector<double> value;
    std::vector<double> deriv;
};

std::vector<AxisSamples> sample_axes(const ExtremalFunction& u, const TensorGrid& grid) {
    std::vector<AxisSamples> out(grid.size());
    for (std::size_t d = 0; d < grid.size(); ++d) {
        const auto& xs = grid[d].x;
        out[d].value.resize(xs.size());
        out[d].deriv.resize(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const SinCosP f = u.factor(d, xs[j]);
            out[d].value[j] = f.sin;
            out[d].deriv[j] = f.cos;
        }
    }
    return out;
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << got << " vs " << want << ")";
        throw DomainError(os.str());
    }
}

}  // namespace

// --- ExtremalFunction --------------------------------------------------------

ExtremalFunction::ExtremalFunction(PExponent p, std::vector<AxisFactor> factors, double amplitude,
                                   std::vector<double> shifts)
    : p_(p), factors_(std::move(factors)), amplitude_(amplitude), shifts_(std::move(shifts)) {
    if (factors_.empty()) {
        throw DomainError("extremal function needs at least one axis");
    }
    for (const auto& f : factors_) {
        if (!(f.lo < f.hi) || !std::isfinite(f.lo) || !std::isfinite(f.hi) || !(f.frequency > 0.0) ||
            !std::isfinite(f.frequency) || !std::isfinite(f.origin)) {
            throw DomainError("invalid axis factor");
        }
    }
    if (shifts_.empty()) {
        shifts_.assign(factors_.size(), 0.0);
    }
    require_dim(shifts_.size(), factors_.size(), "extremal function shifts");
    if (!std::isfinite(amplitude_)) {
        throw DomainError("extremal function amplitude must be finite");
    }
}

Rectangle ExtremalFunction::support_box() const {
    std::vector<Interval> iv;
    iv.reserve(dim());
    for (std::size_t d = 0; d < dim(); ++d) {
        iv.push_back({factors_[d].lo + shifts_[d], factors_[d].hi + shifts_[d]});
    }
    return Rectangle(std::move(iv));
}

SinCosP ExtremalFunction::factor(std::size_t axis, double x) const {
    const AxisFactor& f = factors_[axis];
    const double xs = x - shifts_[axis];
    if (xs < f.lo || xs > f.hi) {
        return {0.0, 0.0};
    }
    const SinCosP sc = sincos_p(p_, f.frequency * (xs - f.origin));
    return {sc.sin, f.frequency * sc.cos};
}

double ExtremalFunction::value(std::span<const double> x) const {
    require_dim(x.size(), dim(), "ExtremalFunction::value");
    double v = amplitude_;
    for (std::size_t d = 0; d < dim() && v != 0.0; ++d) {
        v *= factor(d, x[d]).sin;
    }
    return v;
}

void ExtremalFunction::gradient(std::span<const double> x, std::span<double> out) const {
    require_dim(x.size(), dim(), "ExtremalFunction::gradient");
    require_dim(out.size(), dim(), "ExtremalFunction::gradient");
    std::vector<SinCosP> f(dim());
    for (std::size_t d = 0; d < dim(); ++d) {
        f[d] = factor(d, x[d]);
    }
    for (std::size_t i = 0; i < dim(); ++i) {
        double g = amplitude_ * f[i].cos;
        for (std::size_t j = 0; j < dim(); ++j) {
            if (j != i) {
                g *= f[j].sin;
            }
        }
        out[i] = g;
    }
}

double ExtremalFunction::half_period(std::size_t axis) const {
    return p_.pi_p() / factors_[axis].frequency;
}

std::vector<double> ExtremalFunction::breaks(std::size_t axis) const {
    const AxisFactor& f = factors_[axis];
    const double quarter = 0.5 * half_period(axis);
    const auto j_lo = static_cast<long long>(std::ceil((f.lo - f.origin) / quarter - 1e-9));
    const auto j_hi = static_cast<long long>(std::floor((f.hi - f.origin) / quarter + 1e-9));
    std::vector<double> inner;
    for (long long j = j_lo; j <= j_hi; ++j) {
        inner.push_back(f.origin + static_cast<double>(j) * quarter);
    }
    std::vector<double> out = merged_breaks(f.lo, f.hi, std::move(inner));
    for (double& b : out) {
        b += shifts_[axis];
    }
    return out;
}

ExtremalFunction ExtremalFunction::translated(std::span<const double> offset) const {
    require_dim(offset.size(), dim(), "ExtremalFunction::translated");
    std::vector<double> s = shifts_;
    for (std::size_t d = 0; d < dim(); ++d) {
        s[d] += offset[d];
    }
    return ExtremalFunction(p_, factors_, amplitude_, std::move(s));
}

ExtremalFunction ExtremalFunction::scaled(double c) const {
    return ExtremalFunction(p_, factors_, amplitude_ * c, shifts_);
}

ExtremalFunction rectangle_maximizer(const PExponent& p, const Rectangle& r) {
    std::vector<AxisFactor> f;
    f.reserve(r.dim());
    for (const auto& iv : r.intervals()) {
        f.push_back({iv.lo, iv.hi, iv.lo, p.pi_p() / iv.length()});
    }
    return ExtremalFunction(p, std::move(f));
}

ExtremalFunction strip_trial(const PExponent& p, const StripDomain& d, double l) {
    if (!(l > 0.0) || !std::isfinite(l)) {
        throw DomainError("strip trial half-width l must be a positive finite number");
    }
    if (d.free_axes() == 0) {
        throw DomainError("strip trial needs at least one unbounded axis");
    }
    std::vector<AxisFactor> f;
    for (std::size_t j = 0; j < d.free_axes(); ++j) {
        f.push_back({-l, l, 0.0, p.pi_p() / l});
    }
    for (const auto& iv : d.intervals()) {
        f.push_back({iv.lo, iv.hi, iv.lo, p.pi_p() / iv.length()});
    }
    return ExtremalFunction(p, std::move(f));
}

Rectangle strip_box(const StripDomain& d, double l) {
    std::vector<Interval> iv(d.free_axes(), Interval{-l, l});
    iv.insert(iv.end(), d.intervals().begin(), d.intervals().end());
    return Rectangle(std::move(iv));
}

// --- Bump --------------------------------------------------------------------

double Bump::value(std::span<const double> x) const {
    if (!box.contains(x)) {
        return 0.0;
    }
    double v = height;
    for (std::size_t i = 0; i < box.dim(); ++i) {
        const double len = box[i].length();
        const double q = 4.0 * (x[i] - box[i].lo) * (box[i].hi - x[i]) / (len * len);
        v *= q * q * q;
    }
    return v;
}

void Bump::gradient(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = box.dim();
    if (!box.contains(x)) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    std::vector<double> q(n);
    std::vector<double> dq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double len = box[i].length();
        const double t = 4.0 * (x[i] - box[i].lo) * (box[i].hi - x[i]) / (len * len);
        q[i] = t * t * t;
        dq[i] = 3.0 * t * t * 4.0 * (box[i].hi + box[i].lo - 2.0 * x[i]) / (len * len);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double g = height * dq[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                g *= q[j];
            }
        }
        out[i] = g;
    }
}

CompactPiece Bump::piece() const {
    return {[b = *this](std::span<const double> x) { return b.value(x); }, box};
}

// --- FunctionSum -------------------------------------------------------------

void FunctionSum::add(double c, ExtremalFunction u) {
    if (empty() && dim_ == 0) {
        dim_ = u.dim();
    }
    require_dim(u.dim(), dim_, "FunctionSum::add");
    extremal_.emplace_back(c, std::move(u));
}

void FunctionSum::add(double c, CompactPiece piece) {
    if (empty() && dim_ == 0) {
        dim_ = piece.box.dim();
    }
    require_dim(piece.box.dim(), dim_, "FunctionSum::add");
    pieces_.emplace_back(c, std::move(piece));
}

double FunctionSum::value(std::span<const double> x) const {
    double v = 0.0;
    for (const auto& [c, u] : extremal_) {
        v += c * u.value(x);
    }
    for (const auto& [c, piece] : pieces_) {
        if (piece.box.contains(x)) {
            v += c * piece.f(x);
        }
    }
    return v;
}

std::vector<double> FunctionSum::sample(const TensorGrid& grid) const {
    require_dim(grid.size(), dim_, "FunctionSum::sample");
    std::size_t total = 1;
    for (const auto& axis : grid) {
        total *= axis.x.size();
    }
    std::vector<double> out(total, 0.0);
    for (const auto& [c, u] : extremal_) {
        const auto samples = sample_axes(u, grid);
        const double scale = c * u.amplitude();
        std::size_t k = 0;
        for_each_index(grid, [&](std::span<const std::size_t> idx, double) {
            double v = scale;
            for (std::size_t d = 0; d < idx.size() && v != 0.0; ++d) {
                v *= samples[d].value[idx[d]];
            }
            out[k++] += v;
        });
    }
    for (const auto& [c, piece] : pieces_) {
        std::size_t k = 0;
        for_each_node(grid, [&](std::span<const double> x, double) {
            if (piece.box.contains(x)) {
                out[k] += c * piece.f(x);
            }
            ++k;
        });
    }
    return out;
}

std::vector<double> FunctionSum::breaks(std::size_t axis) const {
    std::vector<double> out;
    for (const auto& [c, u] : extremal_) {
        const auto b = u.breaks(axis);
        out.insert(out.end(), b.begin(), b.end());
    }
    for (const auto& [c, piece] : pieces_) {
        out.push_back(piece.box[axis].lo);
        out.push_back(piece.box[axis].hi);
    }
    return out;
}

// --- norms -------------------------------------------------------------------

double SobolevNorms::w_norm(double p) const { return std::pow(func_norm_p + grad_norm_p, 1.0 / p); }

double SobolevNorms::lp_norm(double p) const { return std::pow(func_norm_p, 1.0 / p); }

FunctionSum FunctionSum::restricted_to(const Rectangle& box) const {
    FunctionSum out(dim_);
    for (const auto& [c, f] : extremal_) {
        if (!f.support_box().interior_disjoint(box)) {
            out.add(c, f);
        }
    }
    for (const auto& [c, g] : pieces_) {
        if (!g.box.interior_disjoint(box)) {
            out.add(c, g);
        }
    }
    return out;
}

SobolevNorms sobolev_norms(const FunctionSum& u, const TensorGrid& grid, double p) {
    if (u.has_pieces()) {
        throw DomainError("sobolev_norms needs analytic gradients; the sum has compact pieces");
    }
    require_dim(grid.size(), u.dim(), "sobolev_norms");
    const std::size_t n = grid.size();
    struct Term {
        double scale;
        std::vector<AxisSamples> samples;
    };
    std::vector<Term> terms;
    for (const auto& [c, f] : u.extremal_terms()) {
        terms.push_back({c * f.amplitude(), sample_axes(f, grid)});
    }

    SobolevNorms out;
    if (terms.size() == 1) {
        // A single product: both parts factor into 1-D sums over the same nodes.
        std::vector<double> func(n, 0.0), deriv(n, 0.0);
        for (std::size_t d = 0; d < n; ++d) {
            const auto& s = terms[0].samples[d];
            for (std::size_t i = 0; i < grid[d].w.size(); ++i) {
                func[d] += grid[d].w[i] * abs_pow(s.value[i], p);
                deriv[d] += grid[d].w[i] * abs_pow(s.deriv[i], p);
            }
        }
        const double scale = abs_pow(terms[0].scale, p);
        out.func_norm_p = scale;
        for (std::size_t d = 0; d < n; ++d) {
            out.func_norm_p *= func[d];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double g = scale * deriv[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    g *= func[j];
                }
            }
            out.grad_norm_p += g;
        }
        return out;
    }
    std::vector<double> grad(n);
    for_each_index(grid, [&](std::span<const std::size_t> idx, double w) {
        double value = 0.0;
        std::fill(grad.begin(), grad.end(), 0.0);
        for (const Term& t : terms) {
            bool live = true;
            for (std::size_t d = 0; d < n; ++d) {
                const auto& s = t.samples[d];
                if (s.value[idx[d]] == 0.0 && s.deriv[idx[d]] == 0.0) {
                    live = false;
                    break;
                }
            }
            if (!live) {
                continue;
            }
            double prod = t.scale;
            for (std::size_t d = 0; d < n; ++d) {
                prod *= t.samples[d].value[idx[d]];
            }
            value += prod;
            for (std::size_t i = 0; i < n; ++i) {
                double g = t.scale * t.samples[i].deriv[idx[i]];
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) {
                        g *= t.samples[j].value[idx[j]];
                    }
                }
                grad[i] += g;
            }
        }
        out.func_norm_p += w * abs_pow(value, p);
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g += abs_pow(grad[i], p);
        }
        out.grad_norm_p += w * g;
    });
    return out;
}

TensorGrid aligned_grid(const FunctionSum& u, const Rectangle& box, int resolution,
                        const QuadratureRule& rule) {
    if (box.dim() > kMaxQuadratureDim) {
        std::ostringstream os;
        os << "quadrature verification supports at most " << kMaxQuadratureDim
           << " dimensions, got " << box.dim();
        throw DimensionCapError(os.str());
    }
    if (resolution < 1) {
        throw DomainError("resolution must be positive");
    }
    require_dim(box.dim(), u.dim(), "aligned_grid");
    TensorGrid grid;
    for (std::size_t d = 0; d < box.dim(); ++d) {
        double width = box[d].length() / resolution;
        for (const auto& [c, f] : u.extremal_terms()) {
            width = std::min(width, f.half_period(d) / resolution);
        }
        const auto breaks = merged_breaks(box[d].lo, box[d].hi, u.breaks(d));
        grid.push_back(axis_nodes(breaks, width, rule));
    }
    return grid;
}

namespace {

RayleighReport make_report(const SobolevNorms& fine, const SobolevNorms& coarse) {
    if (!(fine.func_norm_p > 0.0) || !(coarse.func_norm_p > 0.0)) {
        throw ZeroFunctionError("Rayleigh quotient of the zero function");
    }
    RayleighReport r;
    r.grad_norm_p = fine.grad_norm_p;
    r.func_norm_p = fine.func_norm_p;
    r.quotient = fine.grad_norm_p / fine.func_norm_p;
    r.quad_error = std::abs(r.quotient - coarse.grad_norm_p / coarse.func_norm_p);
    return r;
}

void require_resolution(int resolution) {
    if (resolution < 8) {
        throw DomainError("rayleigh needs resolution >= 8");
    }
}

}  // namespace

RayleighReport rayleigh(const ExtremalFunction& u, const Rectangle& box, const PExponent& p,
                        int resolution) {
    require_resolution(resolution);
    require_dim(box.dim(), u.dim(), "rayleigh");
    FunctionSum s(u.dim());
    s.add(1.0, u);
    const SobolevNorms fine = sobolev_norms(s, aligned_grid(s, box, resolution), p.p());
    const SobolevNorms coarse = sobolev_norms(s, aligned_grid(s, box, resolution / 2), p.p());
    return make_report(fine, coarse);
}

RayleighReport rayleigh(const TrialFunction& u, const Rectangle& box, const PExponent& p,
                        int resolution) {
    require_resolution(resolution);
    if (!u.value) {
        throw DomainError("trial function has no value callback");
    }
    const std::size_t n = box.dim();
    if (n > kMaxQuadratureDim) {
        throw DimensionCapError("generic Rayleigh quotient supports at most 4 dimensions");
    }
    double min_side = std::numeric_limits<double>::infinity();
    for (const auto& iv : box.intervals()) {
        min_side = std::min(min_side, iv.length());
    }
    const double h = 1e-5 * min_side;

    auto norms_at = [&](int res) {
        TensorGrid grid;
        for (std::size_t d = 0; d < n; ++d) {
            std::vector<double> inner = d < u.breaks.size() ? u.breaks[d] : std::vector<double>{};
            const auto breaks = merged_breaks(box[d].lo, box[d].hi, std::move(inner));
            grid.push_back(axis_nodes(breaks, box[d].length() / res));
        }
        SobolevNorms out;
        std::vector<double> g(n);
        std::vector<double> y(n);
        for_each_node(grid, [&](std::span<const double> x, double w) {
            out.func_norm_p += w * abs_pow(u.value(x), p.p());
            if (u.gradient) {
                u.gradient(x, g);
            } else {
                std::copy(x.begin(), x.end(), y.begin());
                for (std::size_t i = 0; i < n; ++i) {
                    y[i] = x[i] + h;
                    const double fp = u.value(y);
                    y[i] = x[i] - h;
                    const double fm = u.value(y);
                    y[i] = x[i];
                    g[i] = (fp - fm) / (2.0 * h);
                }
            }
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += abs_pow(g[i], p.p());
            }
            out.grad_norm_p += w * s;
        });
        return out;
    };
    return make_report(norms_at(resolution), norms_at(resolution / 2));
}

SobolevNorms ul_closed_norms(const PExponent& p, const StripDomain& d, double l) {
    const double pp = p.p();
    const auto k = static_cast<double>(d.free_axes());
    const auto bounded = static_cast<double>(d.intervals().size());
    double prod = 1.0;
    double inv_sum = 0.0;
    for (const auto& iv : d.intervals()) {
        prod *= iv.length();
        inv_sum += std::pow(iv.length(), -pp);
    }
    const double free_part = std::pow(2.0 * l / pp, k);
    SobolevNorms out;
    out.func_norm_p = free_part * prod / std::pow(pp, bounded);
    out.grad_norm_p = std::pow(p.pi_p(), pp) / (p.conj() * std::pow(pp, bounded - 1.0)) * free_part * prod *
                      (k / std::pow(l, pp) + inv_sum);
    return out;
}

UlNormReport verify_ul_norms(const PExponent& p, const StripDomain& d, double l, int resolution) {
    require_resolution(resolution);
    const ExtremalFunction u = strip_trial(p, d, l);
    const Rectangle box = strip_box(d, l);
    FunctionSum s(u.dim());
    s.add(1.0, u);

    UlNormReport r;
    r.quadrature = sobolev_norms(s, aligned_grid(s, box, resolution), p.p());
    const SobolevNorms coarse = sobolev_norms(s, aligned_grid(s, box, resolution / 2), p.p());
    r.closed_form = ul_closed_norms(p, d, l);
    r.func_diff = std::abs(r.quadrature.func_norm_p - r.closed_form.func_norm_p);
    r.grad_diff = std::abs(r.quadrature.grad_norm_p - r.closed_form.grad_norm_p);
    r.quotient = r.quadrature.grad_norm_p / r.quadrature.func_norm_p;
    r.closed_quotient = r.closed_form.grad_norm_p / r.closed_form.func_norm_p;
    r.quad_error = std::abs(r.quotient - coarse.grad_norm_p / coarse.func_norm_p);
    return r;
}

}  // namespace stripemb
