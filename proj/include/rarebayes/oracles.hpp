#pragma once

#include <cstddef>
#include <vector>

#include "rarebayes/models.hpp"
#include "rarebayes/priors.hpp"
#include "rarebayes/rng.hpp"

namespace rarebayes {

// Independent cross-checking machinery. Deliberately naive: each oracle is
// a direct transcription of the defining property it verifies.

struct RejectionSample {
  std::vector<std::vector<double>> theta;
  std::size_t trials = 0;
  double acceptance_rate = 0.0;
};

// Accept a prior draw theta when U < c L(theta). Exact posterior sampler
// whenever c <= 1 / max L. Aborts when the running acceptance rate falls
// below `floor` (checked every chunk of a million trials).
RejectionSample rejection_sample(const LogLikelihoodModel& model, const PriorSpec& prior,
                                 double c, std::size_t count, RngStream& rng,
                                 double floor = 1e-6);

struct DirectMcEvidence {
  double p_d = 0.0;        // mean of L over prior draws
  double std_error = 0.0;  // sample std / sqrt(count)
  double cov = 0.0;        // std_error / p_d, +inf when every draw was zero
  std::size_t count = 0;
};

DirectMcEvidence direct_mc_evidence(const LogLikelihoodModel& model, const PriorSpec& prior,
                                    std::size_t count, RngStream& rng);

// Standard Gaussian vector conditioned on u_1 > beta, sampled by inverse
// CDF on the first coordinate; remaining coordinates are unconditional.
std::vector<std::vector<double>> exact_halfspace_conditional(double beta, std::size_t dim,
                                                             std::size_t count,
                                                             RngStream& rng);

}  // namespace rarebayes
