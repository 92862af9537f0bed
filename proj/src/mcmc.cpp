#include "rarebayes/mcmc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rarebayes/errors.hpp"

namespace rarebayes {

void ProposalSpec::validate() const {
  if (!(width >= 0.0) || !std::isfinite(width))
    throw std::invalid_argument("proposal width must be finite and non-negative");
  for (double w : component_widths)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("proposal component width must be finite and non-negative");
}

double ProposalSpec::width_for(std::size_t component) const {
  return component_widths.empty() ? width : component_widths.at(component);
}

void ChainStats::merge(const ChainStats& other) {
  steps += other.steps;
  moved += other.moved;
  repeated += other.repeated;
  component_proposals += other.component_proposals;
  component_accepts += other.component_accepts;
  y_evaluations += other.y_evaluations;
}

double ChainStats::acceptance_rate() const {
  return steps == 0 ? std::nan("") : static_cast<double>(moved) / static_cast<double>(steps);
}

MmaResult mma_step(const StateVector& current, double y_current, double b,
                   const DrivingFn& driving, const ProposalSpec& proposal,
                   RngStream& rng, ChainStats& stats) {
  if (!(y_current > b))
    throw std::invalid_argument("mma_step: current state violates Y > b");
  StateVector candidate = current;
  bool changed = false;
  for (std::size_t j = 0; j < candidate.size(); ++j) {
    double v = rng.uniform();
    double accept_draw = rng.uniform();
    double u = current.u[j];
    double xi = u + proposal.width_for(j) * (2.0 * v - 1.0);
    ++stats.component_proposals;
    // min(1, phi(xi)/phi(u)) without forming the densities.
    if (accept_draw < std::exp(0.5 * (u * u - xi * xi))) {
      ++stats.component_accepts;
      if (xi != u) {
        candidate.u[j] = xi;
        changed = true;
      }
    }
  }
  ++stats.steps;
  if (!changed) {
    ++stats.repeated;
    return {current, y_current, false};
  }
  double y = driving(candidate);
  ++stats.y_evaluations;
  if (std::isnan(y) || y == std::numeric_limits<double>::infinity())
    throw ModelError("driving variable returned NaN or +inf");
  if (y > b) {
    ++stats.moved;
    return {std::move(candidate), y, true};
  }
  ++stats.repeated;
  return {current, y_current, false};
}

ChainResult run_chain(const StateVector& seed, double y_seed, double b,
                      std::size_t length, const DrivingFn& driving,
                      const ProposalSpec& proposal, RngStream& rng) {
  if (length == 0) throw std::invalid_argument("run_chain: length must be positive");
  if (!(y_seed > b)) throw std::invalid_argument("run_chain: seed violates Y > b");
  ChainResult out;
  out.states.reserve(length);
  out.y.reserve(length);
  out.states.push_back(seed);
  out.y.push_back(y_seed);
  for (std::size_t t = 1; t < length; ++t) {
    MmaResult r = mma_step(out.states.back(), out.y.back(), b, driving, proposal,
                           rng, out.stats);
    out.states.push_back(std::move(r.state));
    out.y.push_back(r.y);
  }
  return out;
}

}  // namespace rarebayes
