#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rarebayes/priors.hpp"
#include "rarebayes/rng.hpp"

namespace rarebayes {

// Driving variable over the augmented Gaussian state.
using DrivingFn = std::function<double(const StateVector&)>;

// Symmetric uniform component proposal, xi_j = u_j + width * (2V - 1).
struct ProposalSpec {
  double width = 1.0;
  // Per-component widths; empty means `width` for every component.
  std::vector<double> component_widths;

  void validate() const;
  double width_for(std::size_t component) const;

  bool operator==(const ProposalSpec&) const = default;
};

struct ChainStats {
  std::uint64_t steps = 0;
  std::uint64_t moved = 0;      // candidate accepted (state changed)
  std::uint64_t repeated = 0;   // candidate rejected or identical
  std::uint64_t component_proposals = 0;
  std::uint64_t component_accepts = 0;
  std::uint64_t y_evaluations = 0;

  void merge(const ChainStats& other);
  double acceptance_rate() const;
};

struct MmaResult {
  StateVector state;
  double y = 0.0;
  bool moved = false;
};

// One component-wise Metropolis step conditioned on Y > b. Consumes exactly
// two uniforms per component (proposal, acceptance) regardless of outcome,
// so stream position depends only on the step count. The driving variable
// is evaluated once when some component changed and not at all otherwise.
MmaResult mma_step(const StateVector& current, double y_current, double b,
                   const DrivingFn& driving, const ProposalSpec& proposal,
                   RngStream& rng, ChainStats& stats);

struct ChainResult {
  std::vector<StateVector> states;  // length = requested length, seed first
  std::vector<double> y;
  ChainStats stats;
};

// Stationary chain of the given length started (and kept) above b. The seed
// must already satisfy y_seed > b; there is no burn-in.
ChainResult run_chain(const StateVector& seed, double y_seed, double b,
                      std::size_t length, const DrivingFn& driving,
                      const ProposalSpec& proposal, RngStream& rng);

}  // namespace rarebayes
