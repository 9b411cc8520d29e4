#include "stripemb/domain.hpp"

#include <cmath>

namespace stripemb {

StripDomain::StripDomain(std::size_t free_axes, std::vector<Interval> intervals)
    : k_(free_axes), bounded_(std::move(intervals)) {}

double lambda_closed_form(const PExponent& p, const StripDomain& d) {
    double sum = 0.0;
    for (const auto& iv : d.intervals()) {
        sum += std::pow(iv.length(), -p.p());
    }
    return std::pow(p.pi_p(), p.p()) * (p.p() - 1.0) * sum;
}

EmbeddingConstants embedding_norm(const PExponent& p, const StripDomain& d) {
    const double lambda = lambda_closed_form(p, d);
    return {lambda, std::pow(1.0 + lambda, -1.0 / p.p())};
}

}  // namespace stripemb
