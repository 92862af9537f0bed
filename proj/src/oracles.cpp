#include "rarebayes/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rarebayes/errors.hpp"
#include "rarebayes/normal.hpp"

namespace rarebayes {

RejectionSample rejection_sample(const LogLikelihoodModel& model, const PriorSpec& prior,
                                 double c, std::size_t count, RngStream& rng,
                                 double floor) {
  if (prior.dim() != model.dim())
    throw std::invalid_argument("rejection_sample: prior dimension does not match the model");
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("rejection_sample: c must be finite and positive");
  double ln_c = std::log(c);
  RejectionSample out;
  out.theta.reserve(count);
  while (out.theta.size() < count) {
    StateVector s = sample_prior(prior, rng);
    std::vector<double> theta = to_physical(s, prior);
    double ll = model.log_likelihood(theta);
    if (std::isnan(ll) || ll == std::numeric_limits<double>::infinity())
      throw ModelError("rejection_sample: model returned NaN or +inf");
    ++out.trials;
    // U < c L(theta) with U = Phi(u_{n+1}); compared in logs.
    if (norm_log_cdf(s.u.back()) < ln_c + ll) out.theta.push_back(std::move(theta));
    if (out.trials % 1000000 == 0) {
      double rate = static_cast<double>(out.theta.size()) / static_cast<double>(out.trials);
      if (rate < floor)
        throw Error("rejection_sample: acceptance rate below floor; "
                    "reduce the problem size or inflate the noise scale");
    }
  }
  out.acceptance_rate =
      static_cast<double>(out.theta.size()) / static_cast<double>(out.trials);
  return out;
}

DirectMcEvidence direct_mc_evidence(const LogLikelihoodModel& model, const PriorSpec& prior,
                                    std::size_t count, RngStream& rng) {
  if (count < 2) throw std::invalid_argument("direct_mc_evidence: count must exceed 1");
  if (prior.dim() != model.dim())
    throw std::invalid_argument("direct_mc_evidence: prior dimension does not match the model");
  double mean = 0.0;
  double m2 = 0.0;
  bool any_positive = false;
  for (std::size_t i = 0; i < count; ++i) {
    StateVector s = sample_prior(prior, rng);
    double ll = model.log_likelihood(to_physical(s, prior));
    if (std::isnan(ll) || ll == std::numeric_limits<double>::infinity())
      throw ModelError("direct_mc_evidence: model returned NaN or +inf");
    double l = std::exp(ll);
    if (l > 0.0) any_positive = true;
    double d = l - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (l - mean);
  }
  DirectMcEvidence out;
  out.count = count;
  out.p_d = mean;
  out.std_error = std::sqrt(m2 / static_cast<double>(count - 1)) /
                  std::sqrt(static_cast<double>(count));
  out.cov = any_positive ? out.std_error / out.p_d
                         : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<std::vector<double>> exact_halfspace_conditional(double beta, std::size_t dim,
                                                             std::size_t count,
                                                             RngStream& rng) {
  if (dim == 0) throw std::invalid_argument("exact_halfspace_conditional: dim must be positive");
  double tail = std::isinf(beta) && beta < 0.0 ? 1.0 : norm_cdf_complement(beta);
  if (!(tail > 0.0))
    throw std::invalid_argument("exact_halfspace_conditional: beta too far in the tail");
  std::vector<std::vector<double>> out(count);
  for (auto& row : out) {
    row.resize(dim);
    // P(u > x | u > beta) = V  =>  x = -Phi^{-1}(tail * V), full relative
    // precision however deep the half-space sits.
    row[0] = -norm_quantile(tail * rng.uniform());
    for (std::size_t j = 1; j < dim; ++j) row[j] = rng.normal();
  }
  return out;
}

}  // namespace rarebayes
