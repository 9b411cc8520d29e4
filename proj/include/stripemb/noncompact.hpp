#pragma once

// Finite, checkable witnesses for the noncompactness of
// W_0^{1,p}(D) -> L^p(D) on strip domains:
//
//  * a system of m translates of a normalized u_l with disjoint supports,
//    together with the operators B: l^p_m -> W_0^{1,p}(D) and
//    A: L^p(D) -> l^p_m with A I B = id, which bound the m-th isomorphism
//    number from below by ||u||_p;
//  * a refutation of a proposed finite net of compactly supported centers:
//    a unit-ball element translated away from every center stays farther
//    than the net radius from all of them.

#include "stripemb/domain.hpp"
#include "stripemb/extremal.hpp"
#include "stripemb/ptrig.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stripemb {

inline constexpr std::size_t kMaxTranslates = 64;

struct TranslateSystem {
    PExponent p;
    StripDomain domain;
    double l;
    std::size_t m;
    int resolution;                          // cells per sin_p half-period
    ExtremalFunction base;                   // u_l scaled to unit W^{1,p} norm
    std::vector<ExtremalFunction> translates;  // base shifted by 2(i-1)l on every free axis
    std::vector<Rectangle> boxes;            // D_l^i = ((2i-3)l, (2i-1)l)^k x prod (a_j, b_j)
    double raw_w_norm;                       // ||u_l||_{W^{1,p}} before scaling
    double base_lp_norm;                     // ||base||_p
};

TranslateSystem build_translates(const PExponent& p, const StripDomain& d, double l, std::size_t m,
                                 int resolution = 8);

/// B alpha = sum_i alpha_i u_i.
FunctionSum b_operator(const TranslateSystem& ts, const std::vector<double>& alpha);

/// (A v)_i = \int_{D_l^i} v |u_i|^{p-2} u_i / ||u_i||_p^p, the norming
/// functional of u_i applied to v restricted to D_l^i.
std::vector<double> a_operator(const TranslateSystem& ts, const FunctionSum& v);

/// ||v||_p^p as the sum of tensor quadratures over interior-disjoint boxes
/// that cover the support of v.
double lp_power_over(const FunctionSum& v, const std::vector<Rectangle>& boxes, double p, int resolution);

/// ||B alpha||_{W^{1,p}} by quadrature over the translate boxes.
double b_image_w_norm(const TranslateSystem& ts, const FunctionSum& b_alpha);

struct OperatorCertificate {
    double b_isometry_dev = 0.0;    // max |  ||B a||_W - ||a||_p  |
    double a_bound_dev = 0.0;       // max (||A v||_p ||u||_p / ||v||_p - 1)_+
    double aib_identity_dev = 0.0;  // max ||A I B a - a||_p
    double lower_bound = 0.0;       // ||base||_p, certified lower bound on i_m
    std::size_t trials = 0;
    double tol = 0.0;
};

/// Random trials of the three operator checks. Throws CertificationError
/// naming the first violated check if any deviation exceeds tol.
OperatorCertificate certify_isomorphism_bound(const TranslateSystem& ts, std::size_t trials, double tol,
                                              std::uint64_t seed = 42);

struct NetCandidate {
    std::vector<CompactPiece> centers;
    double radius;
};

struct Refutation {
    double translation = 0.0;          // offset applied on every free axis
    ExtremalFunction witness;          // unit W^{1,p} norm, support disjoint from all centers
    double witness_lp_norm = 0.0;
    std::vector<double> margins;       // ||w - g_j||_p at `resolution`
    std::vector<double> margins_fine;  // same at 2 * resolution
    double min_margin = 0.0;
    bool refutes = false;              // every margin at both resolutions > radius
};

/// Throws CertificationError (check "precondition") when ||base||_p <= rtilde
/// or rtilde <= radius, since then this witness cannot refute the net.
Refutation refute_net(const PExponent& p, const StripDomain& d, double l, const NetCandidate& net,
                      double rtilde, int resolution = 8);

/// Net of `count` random polynomial bumps whose boxes lie within
/// |x_j| <= extent on the free axes and inside the bounded intervals.
NetCandidate random_bump_net(const StripDomain& d, std::size_t count, double extent, double radius,
                             std::uint64_t seed);

}  // namespace stripemb
