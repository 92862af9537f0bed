#include "rarebayes/priors.hpp"

#include <cmath>
#include <stdexcept>

#include "rarebayes/errors.hpp"
#include "rarebayes/normal.hpp"

namespace rarebayes {

MarginalSpec MarginalSpec::standard_normal() {
  return {MarginalKind::kStandardNormal, 0.0, 1.0};
}

MarginalSpec MarginalSpec::normal(double mean, double std_dev) {
  if (!(std_dev > 0.0) || !std::isfinite(mean) || !std::isfinite(std_dev))
    throw std::invalid_argument("normal marginal: std must be finite and positive");
  return {MarginalKind::kNormal, mean, std_dev};
}

MarginalSpec MarginalSpec::lognormal(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma))
    throw std::invalid_argument("lognormal marginal: sigma must be finite and positive");
  return {MarginalKind::kLognormal, mu, sigma};
}

MarginalSpec MarginalSpec::uniform(double lower, double upper) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
    throw std::invalid_argument("uniform marginal: requires finite lower < upper");
  return {MarginalKind::kUniform, lower, upper};
}

double MarginalSpec::from_gaussian(double u) const {
  switch (kind) {
    case MarginalKind::kStandardNormal:
      return u;
    case MarginalKind::kNormal:
      return a + b * u;
    case MarginalKind::kLognormal:
      return std::exp(a + b * u);
    case MarginalKind::kUniform:
      return a + (b - a) * norm_cdf(u);
  }
  throw std::logic_error("unreachable marginal kind");
}

double MarginalSpec::to_gaussian(double x) const {
  switch (kind) {
    case MarginalKind::kStandardNormal:
      return x;
    case MarginalKind::kNormal:
      return (x - a) / b;
    case MarginalKind::kLognormal:
      if (!(x > 0.0))
        throw std::invalid_argument("lognormal marginal: value must be positive");
      return (std::log(x) - a) / b;
    case MarginalKind::kUniform: {
      if (!(x >= a && x <= b))
        throw std::invalid_argument("uniform marginal: value outside support");
      double p = (x - a) / (b - a);
      double q = (b - x) / (b - a);
      if (p <= 0.0) return -norm_quantile(0x1.0p-1074);
      if (q <= 0.0) return norm_quantile(1.0 - 0x1.0p-53);
      return p <= 0.5 ? norm_quantile(p) : -norm_quantile(q);
    }
  }
  throw std::logic_error("unreachable marginal kind");
}

MarginalSpec lognormal_from_mode_std(double mode, double std_dev) {
  if (!(mode > 0.0) || !(std_dev > 0.0) || !std::isfinite(mode) || !std::isfinite(std_dev))
    throw std::invalid_argument("lognormal_from_mode_std: mode and std must be positive");
  // With x = sigma^2 and mode m = exp(mu - x), the variance identity
  // reduces to m^2 (e^x - 1) e^{3x} = std^2, monotone increasing in x.
  const double target = (std_dev / mode) * (std_dev / mode);
  auto g = [&](double x) { return std::expm1(x) * std::exp(3.0 * x) - target; };
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  return MarginalSpec::lognormal(std::log(mode) + x, std::sqrt(x));
}

std::vector<double> to_physical(const StateVector& state, const PriorSpec& prior) {
  if (state.size() != prior.dim() + 1)
    throw std::invalid_argument("to_physical: state length must be prior dim + 1");
  std::vector<double> theta(prior.dim());
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    double u = state.u[j];
    if (!std::isfinite(u)) throw std::invalid_argument("to_physical: non-finite state");
    theta[j] = prior.marginals[j].from_gaussian(u);
  }
  return theta;
}

double aux_uniform(const StateVector& state) {
  if (state.size() == 0) throw std::invalid_argument("aux_uniform: empty state");
  return norm_cdf(state.u.back());
}

double aux_log_inv_uniform(const StateVector& state) {
  if (state.size() == 0) throw std::invalid_argument("aux_log_inv_uniform: empty state");
  return -norm_log_cdf(state.u.back());
}

StateVector sample_prior(const PriorSpec& prior, RngStream& rng) {
  StateVector s;
  s.u.resize(prior.dim() + 1);
  for (auto& v : s.u) v = rng.normal();
  return s;
}

std::string to_string(MarginalKind kind) {
  switch (kind) {
    case MarginalKind::kStandardNormal: return "standard-normal";
    case MarginalKind::kNormal: return "normal";
    case MarginalKind::kLognormal: return "lognormal";
    case MarginalKind::kUniform: return "uniform";
  }
  return "?";
}

}  // namespace rarebayes
