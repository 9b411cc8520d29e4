#include "stripemb/noncompact.hpp"

#include "stripemb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace stripemb {

namespace {

double lp_vector_norm(const std::vector<double>& v, double p) {
    double s = 0.0;
    for (double x : v) {
        s += std::pow(std::abs(x), p);
    }
    return std::pow(s, 1.0 / p);
}

FunctionSum single(const ExtremalFunction& u) {
    FunctionSum s(u.dim());
    s.add(1.0, u);
    return s;
}

// Grid on `box` aligned with the breakpoints of every term of both sums.
TensorGrid joint_grid(const FunctionSum& a, const FunctionSum& b, const Rectangle& box, int resolution) {
    FunctionSum both(box.dim());
    for (const auto& [c, u] : a.extremal_terms()) {
        both.add(c, u);
    }
    for (const auto& [c, u] : b.extremal_terms()) {
        both.add(c, u);
    }
    TensorGrid grid = aligned_grid(both, box, resolution);
    // Pieces only contribute breakpoints; re-split each axis at them.
    if (a.has_pieces() || b.has_pieces()) {
        for (std::size_t d = 0; d < box.dim(); ++d) {
            std::vector<double> br{box[d].lo, box[d].hi};
            for (const FunctionSum* s : {&a, &b}) {
                const auto extra = s->breaks(d);
                br.insert(br.end(), extra.begin(), extra.end());
            }
            std::sort(br.begin(), br.end());
            std::vector<double> inside{box[d].lo};
            const double eps = 1e-12 * std::max(1.0, box[d].length());
            for (double x : br) {
                if (x > inside.back() + eps && x < box[d].hi - eps) {
                    inside.push_back(x);
                }
            }
            inside.push_back(box[d].hi);
            double width = box[d].length() / resolution;
            for (const auto& [c, u] : both.extremal_terms()) {
                width = std::min(width, u.half_period(d) / resolution);
            }
            grid[d] = axis_nodes(inside, width);
        }
    }
    return grid;
}

std::vector<double> weights_of(const TensorGrid& grid) {
    std::vector<double> w;
    for_each_index(grid, [&](std::span<const std::size_t>, double weight) { w.push_back(weight); });
    return w;
}

void require_k(const StripDomain& d) {
    if (d.free_axes() == 0) {
        throw DomainError("noncompactness witnesses need at least one unbounded axis (k >= 1)");
    }
}

}  // namespace

TranslateSystem build_translates(const PExponent& p, const StripDomain& d, double l, std::size_t m,
                                 int resolution) {
    require_k(d);
    if (m < 1 || m > kMaxTranslates) {
        std::ostringstream os;
        os << "number of translates must be in [1, " << kMaxTranslates << "], got " << m;
        throw DomainError(os.str());
    }
    if (resolution < 2) {
        throw DomainError("resolution must be >= 2");
    }
    const ExtremalFunction raw = strip_trial(p, d, l);
    const FunctionSum raw_sum = single(raw);
    const SobolevNorms raw_norms = sobolev_norms(raw_sum, aligned_grid(raw_sum, strip_box(d, l), resolution), p.p());
    const double raw_w = raw_norms.w_norm(p.p());
    const ExtremalFunction base = raw.scaled(1.0 / raw_w);

    TranslateSystem ts{p, d, l, m, resolution, base, {}, {}, raw_w, raw_norms.lp_norm(p.p()) / raw_w};
    const std::size_t n = d.dim();
    const std::size_t k = d.free_axes();
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> shift(n, 0.0);
        const double offset = 2.0 * static_cast<double>(i) * l;
        std::fill(shift.begin(), shift.begin() + static_cast<std::ptrdiff_t>(k), offset);
        ts.translates.push_back(base.translated(shift));

        std::vector<Interval> iv(k, Interval{offset - l, offset + l});
        iv.insert(iv.end(), d.intervals().begin(), d.intervals().end());
        ts.boxes.emplace_back(std::move(iv));
    }
    return ts;
}

FunctionSum b_operator(const TranslateSystem& ts, const std::vector<double>& alpha) {
    if (alpha.size() != ts.m) {
        throw DomainError("B operator needs a coefficient vector of length m");
    }
    FunctionSum s(ts.domain.dim());
    for (std::size_t i = 0; i < ts.m; ++i) {
        if (alpha[i] != 0.0) {
            s.add(alpha[i], ts.translates[i]);
        }
    }
    return s;
}

std::vector<double> a_operator(const TranslateSystem& ts, const FunctionSum& v) {
    const double pp = ts.p.p();
    const double norm_p = std::pow(ts.base_lp_norm, pp);
    std::vector<double> out(ts.m, 0.0);
    if (v.empty()) {
        return out;
    }
    for (std::size_t i = 0; i < ts.m; ++i) {
        const FunctionSum ui = single(ts.translates[i]);
        const FunctionSum vi = v.restricted_to(ts.boxes[i]);
        if (vi.empty()) {
            continue;
        }
        const TensorGrid grid = joint_grid(vi, ui, ts.boxes[i], ts.resolution);
        const std::vector<double> vs = vi.sample(grid);
        const std::vector<double> us = ui.sample(grid);
        const std::vector<double> w = weights_of(grid);
        double sum = 0.0;
        for (std::size_t j = 0; j < vs.size(); ++j) {
            if (us[j] != 0.0 && vs[j] != 0.0) {
                sum += w[j] * vs[j] * std::copysign(std::pow(std::abs(us[j]), pp - 1.0), us[j]);
            }
        }
        out[i] = sum / norm_p;
    }
    return out;
}

double lp_power_over(const FunctionSum& v, const std::vector<Rectangle>& boxes, double p, int resolution) {
    double total = 0.0;
    const FunctionSum none(v.dim());
    for (const Rectangle& box : boxes) {
        const FunctionSum vb = v.restricted_to(box);
        if (vb.empty()) {
            continue;
        }
        const TensorGrid grid = joint_grid(vb, none, box, resolution);
        const std::vector<double> vs = vb.sample(grid);
        const std::vector<double> w = weights_of(grid);
        for (std::size_t j = 0; j < vs.size(); ++j) {
            total += w[j] * std::pow(std::abs(vs[j]), p);
        }
    }
    return total;
}

double b_image_w_norm(const TranslateSystem& ts, const FunctionSum& b_alpha) {
    double total = 0.0;
    for (const Rectangle& box : ts.boxes) {
        const FunctionSum part = b_alpha.restricted_to(box);
        if (part.empty()) {
            continue;
        }
        const SobolevNorms s = sobolev_norms(part, aligned_grid(part, box, ts.resolution), ts.p.p());
        total += s.func_norm_p + s.grad_norm_p;
    }
    return std::pow(total, 1.0 / ts.p.p());
}

OperatorCertificate certify_isomorphism_bound(const TranslateSystem& ts, std::size_t trials, double tol,
                                              std::uint64_t seed) {
    if (trials < 10) {
        throw DomainError("certificate needs at least 10 trials");
    }
    if (!(tol > 0.0)) {
        throw DomainError("certificate tolerance must be positive");
    }
    const double pp = ts.p.p();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> frac(0.0, 1.0);

    OperatorCertificate cert;
    cert.trials = trials;
    cert.tol = tol;
    cert.lower_bound = ts.base_lp_norm;

    auto random_alpha = [&] {
        std::vector<double> a(ts.m);
        do {
            for (double& x : a) {
                x = unit(rng);
            }
        } while (lp_vector_norm(a, pp) == 0.0);
        return a;
    };

    for (std::size_t t = 0; t < trials; ++t) {
        // B is an isometry and A inverts it.
        const std::vector<double> alpha = random_alpha();
        const FunctionSum b_alpha = b_operator(ts, alpha);
        const double alpha_norm = lp_vector_norm(alpha, pp);
        cert.b_isometry_dev = std::max(cert.b_isometry_dev, std::abs(b_image_w_norm(ts, b_alpha) - alpha_norm));

        std::vector<double> round = a_operator(ts, b_alpha);
        for (std::size_t i = 0; i < ts.m; ++i) {
            round[i] -= alpha[i];
        }
        cert.aib_identity_dev = std::max(cert.aib_identity_dev, lp_vector_norm(round, pp));

        // ||A v|| <= ||v||_p / ||u||_p on a mix of translates and bumps
        // supported in the translate boxes.
        FunctionSum v(ts.domain.dim());
        const std::vector<double> beta = random_alpha();
        for (std::size_t i = 0; i < ts.m; ++i) {
            if (t % 3 != 2) {
                v.add(beta[i], ts.translates[i]);
            }
        }
        const std::size_t bumps = t % 3 == 0 ? 0 : 1 + t % 4;
        for (std::size_t b = 0; b < bumps; ++b) {
            const Rectangle& host = ts.boxes[static_cast<std::size_t>(frac(rng) * static_cast<double>(ts.m)) % ts.m];
            std::vector<Interval> iv;
            for (const Interval& h : host.intervals()) {
                const double x0 = h.lo + frac(rng) * h.length();
                const double x1 = h.lo + frac(rng) * h.length();
                const double lo = std::min(x0, x1);
                const double hi = std::max(std::max(x0, x1), lo + 1e-3 * h.length());
                iv.push_back({lo, std::min(hi, h.hi)});
            }
            v.add(2.0 * unit(rng), Bump{Rectangle(std::move(iv)), 1.0}.piece());
        }
        const double v_norm = std::pow(lp_power_over(v, ts.boxes, pp, ts.resolution), 1.0 / pp);
        if (v_norm > 0.0) {
            const double ratio = lp_vector_norm(a_operator(ts, v), pp) * ts.base_lp_norm / v_norm;
            cert.a_bound_dev = std::max(cert.a_bound_dev, std::max(0.0, ratio - 1.0));
        }
    }

    auto check = [&](const char* name, double dev) {
        if (dev > tol) {
            std::ostringstream os;
            os << "operator certificate failed: " << name << " deviation " << dev << " exceeds " << tol;
            throw CertificationError(os.str(), name, dev);
        }
    };
    check("b_isometry", cert.b_isometry_dev);
    check("a_bound", cert.a_bound_dev);
    check("aib_identity", cert.aib_identity_dev);
    return cert;
}

Refutation refute_net(const PExponent& p, const StripDomain& d, double l, const NetCandidate& net,
                      double rtilde, int resolution) {
    require_k(d);
    if (!(net.radius > 0.0)) {
        throw DomainError("net radius must be positive");
    }
    if (!(rtilde > net.radius)) {
        std::ostringstream os;
        os << "rtilde (" << rtilde << ") must exceed the net radius (" << net.radius << ")";
        throw CertificationError(os.str(), "precondition", net.radius - rtilde);
    }
    const TranslateSystem ts = build_translates(p, d, l, 1, resolution);
    if (!(ts.base_lp_norm > rtilde)) {
        std::ostringstream os;
        os << "witness L^p norm " << ts.base_lp_norm << " does not exceed rtilde " << rtilde
           << "; no refutation with this l";
        throw CertificationError(os.str(), "precondition", rtilde - ts.base_lp_norm);
    }

    const std::size_t k = d.free_axes();
    const std::size_t n = d.dim();
    double reach = -std::numeric_limits<double>::infinity();
    for (const CompactPiece& g : net.centers) {
        if (g.box.dim() != n) {
            throw DomainError("net center dimension does not match the domain");
        }
        for (std::size_t j = 0; j < k; ++j) {
            reach = std::max(reach, g.box[j].hi);
        }
    }
    Refutation r{0.0, ts.base, ts.base_lp_norm, {}, {}, std::numeric_limits<double>::infinity(), true};
    r.translation = net.centers.empty() ? 0.0 : std::max(0.0, reach + l);
    // -l + (reach + l) may round below reach.
    while (!net.centers.empty() && r.translation - l < reach) {
        r.translation = std::nextafter(r.translation, std::numeric_limits<double>::infinity());
    }
    std::vector<double> shift(n, 0.0);
    std::fill(shift.begin(), shift.begin() + static_cast<std::ptrdiff_t>(k), r.translation);
    r.witness = ts.base.translated(shift);
    const Rectangle w_box = r.witness.support_box();

    for (const CompactPiece& g : net.centers) {
        if (!w_box.interior_disjoint(g.box)) {
            throw CertificationError("translated witness overlaps a net center", "disjointness", 0.0);
        }
        FunctionSum diff(n);
        diff.add(1.0, r.witness);
        diff.add(-1.0, g);
        const std::vector<Rectangle> cover{w_box, g.box};
        const double coarse = std::pow(lp_power_over(diff, cover, p.p(), resolution), 1.0 / p.p());
        const double fine = std::pow(lp_power_over(diff, cover, p.p(), 2 * resolution), 1.0 / p.p());
        r.margins.push_back(coarse);
        r.margins_fine.push_back(fine);
        r.min_margin = std::min({r.min_margin, coarse, fine});
        if (!(coarse > net.radius && fine > net.radius)) {
            r.refutes = false;
        }
    }
    if (net.centers.empty()) {
        r.min_margin = r.witness_lp_norm;
        r.refutes = r.witness_lp_norm > net.radius;
    }
    return r;
}

NetCandidate random_bump_net(const StripDomain& d, std::size_t count, double extent, double radius,
                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    NetCandidate net{{}, radius};
    const std::size_t k = d.free_axes();
    for (std::size_t c = 0; c < count; ++c) {
        std::vector<Interval> iv;
        for (std::size_t j = 0; j < k; ++j) {
            const double a = -extent + 2.0 * extent * frac(rng);
            const double b = -extent + 2.0 * extent * frac(rng);
            iv.push_back({std::min(a, b), std::max(std::max(a, b), std::min(a, b) + 1e-3 * extent)});
        }
        for (const Interval& h : d.intervals()) {
            const double a = h.lo + frac(rng) * h.length();
            const double b = h.lo + frac(rng) * h.length();
            const double lo = std::min(a, b);
            iv.push_back({lo, std::min(h.hi, std::max(std::max(a, b), lo + 1e-3 * h.length()))});
        }
        const double height = -2.0 + 4.0 * frac(rng);
        net.centers.push_back(Bump{Rectangle(std::move(iv)), height}.piece());
    }
    return net;
}

}  // namespace stripemb
