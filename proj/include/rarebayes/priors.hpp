#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rarebayes/rng.hpp"

namespace rarebayes {

// The sampler works in an (n+1)-dimensional standard Gaussian space: the
// first n coordinates map through the prior marginals to the physical
// parameters, the last coordinate carries the auxiliary uniform
// U = Phi(u_{n+1}) of the driving variable.

struct StateVector {
  std::vector<double> u;

  std::size_t size() const { return u.size(); }
  bool operator==(const StateVector&) const = default;
};

enum class MarginalKind { kStandardNormal, kNormal, kLognormal, kUniform };

// One prior marginal. `a`/`b` hold (mean, std) for normal, (mu, sigma)
// for lognormal and (lower, upper) for uniform; unused for standard normal.
struct MarginalSpec {
  MarginalKind kind = MarginalKind::kStandardNormal;
  double a = 0.0;
  double b = 1.0;

  static MarginalSpec standard_normal();
  static MarginalSpec normal(double mean, double std_dev);
  static MarginalSpec lognormal(double mu, double sigma);
  static MarginalSpec uniform(double lower, double upper);

  // F^{-1}(Phi(u)): standard Gaussian coordinate to physical parameter.
  double from_gaussian(double u) const;
  // Phi^{-1}(F(x)), the exact inverse of from_gaussian. Algebraic for the
  // normal families; the uniform case picks the shorter tail so precision
  // survives near the interval ends.
  double to_gaussian(double x) const;

  bool operator==(const MarginalSpec&) const = default;
};

// Solves for the (mu, sigma) of a lognormal with the requested mode and
// standard deviation. Both inputs must be positive.
MarginalSpec lognormal_from_mode_std(double mode, double std_dev);

struct PriorSpec {
  std::vector<MarginalSpec> marginals;

  std::size_t dim() const { return marginals.size(); }
  bool operator==(const PriorSpec&) const = default;
};

// Physical parameters of a state; requires state.size() == prior.dim() + 1.
std::vector<double> to_physical(const StateVector& state, const PriorSpec& prior);

// The auxiliary uniform carried in the last coordinate.
double aux_uniform(const StateVector& state);

// ln(1/U) evaluated without forming U, stable for far-negative aux values.
double aux_log_inv_uniform(const StateVector& state);

// One (n+1)-dimensional draw; consumes exactly n+1 uniforms from rng.
StateVector sample_prior(const PriorSpec& prior, RngStream& rng);

std::string to_string(MarginalKind kind);

}  // namespace rarebayes
