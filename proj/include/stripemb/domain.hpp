#pragma once

#include "stripemb/ptrig.hpp"
#include "stripemb/quad.hpp"

#include <cstddef>
#include <vector>

namespace stripemb {

/// D = R^k x prod (a_i, b_i). With k = 0 this is the bounded rectangle.
class StripDomain {
public:
    StripDomain(std::size_t free_axes, std::vector<Interval> intervals);

    [[nodiscard]] std::size_t free_axes() const noexcept { return k_; }
    [[nodiscard]] std::size_t dim() const noexcept { return k_ + bounded_.dim(); }
    [[nodiscard]] const Rectangle& bounded() const noexcept { return bounded_; }
    [[nodiscard]] const std::vector<Interval>& intervals() const noexcept { return bounded_.intervals(); }
    [[nodiscard]] bool is_rectangle() const noexcept { return k_ == 0; }

private:
    std::size_t k_;
    Rectangle bounded_;
};

/// lambda: infimum of the Rayleigh quotient |||grad u|_{l^p}||_p^p / ||u||_p^p
/// over W_0^{1,p}(D). norm: ||W_0^{1,p}(D) -> L^p(D)|| = (1 + lambda)^{-1/p}.
struct EmbeddingConstants {
    double lambda;
    double norm;
};

/// pi_p^p (p - 1) sum_i (b_i - a_i)^{-p}; does not depend on k.
double lambda_closed_form(const PExponent& p, const StripDomain& d);

EmbeddingConstants embedding_norm(const PExponent& p, const StripDomain& d);

}  // namespace stripemb
