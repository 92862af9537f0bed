#pragma once

#include <cstdint>
#include <vector>

#include "rarebayes/mcmc.hpp"
#include "rarebayes/priors.hpp"
#include "rarebayes/rng.hpp"

namespace rarebayes {

struct SusConfig {
  double p0 = 0.1;
  std::size_t n = 1000;       // samples per level
  std::size_t max_levels = 10;  // budget for conditional levels
  std::uint64_t seed = 0;

  // Enforced at the configuration boundary: p0*n and 1/p0 integral,
  // n >= 100, at least one conditional level allowed.
  void validate() const;

  std::size_t seeds_per_level() const;  // p0 * n
  std::size_t chain_length() const;     // 1 / p0

  bool operator==(const SusConfig&) const = default;
};

// Worker cap for level generation; results are identical for any value.
struct ExecPolicy {
  int threads = 1;
};

// One level of a run. Samples are stored chain-major: level 0 is n chains
// of length 1, conditional levels are p0*n chains of length 1/p0 with the
// seed first. gamma/delta describe the estimator of the *next* threshold's
// conditional probability and are NaN until that threshold is chosen
// (and stay NaN on the final level).
struct LevelRecord {
  int level = 0;
  double threshold = 0.0;  // -inf on level 0
  std::size_t chain_length = 1;
  std::vector<StateVector> states;
  std::vector<double> y;
  ChainStats stats;
  double gamma = 0.0;
  double delta = 0.0;

  std::size_t chain_count() const { return y.size() / chain_length; }
};

// Pooled complementary-CDF curve of the driving variable. Each level i
// contributes its boundary point (b_i, p0^i) plus the order statistics
// falling inside [b_i, b_{i+1}); ties from repeated chain states collapse
// to the largest rank. b is strictly increasing, p non-increasing. The
// level scale is the running product of observed transition fractions,
// which is exactly p0^i whenever thresholds came from next_threshold.
struct CcdfPoint {
  double b = 0.0;
  double p = 0.0;
  double ln_p = 0.0;
  double v = 0.0;  // b + ln_p
  int level = 0;
};

struct CcdfCurve {
  std::vector<CcdfPoint> points;
};

struct CovEstimate {
  double delta = 0.0;               // sqrt(sum of per-level delta_i^2)
  std::vector<double> gamma_i;      // per transition level
  std::vector<double> delta_i;
};

// Monte Carlo level: n independent prior draws, one driving evaluation
// each. Evaluation faults are rethrown with the sample index attached.
LevelRecord run_level_zero(const SusConfig& config, const DrivingFn& driving,
                           const PriorSpec& prior, const RngFactory& rng,
                           const ExecPolicy& exec = {});

// The (p0*n + 1)-th largest Y of the level. Throws PlateauError when fewer
// than p0*n values lie strictly above it, or when it fails to increase.
double next_threshold(const LevelRecord& level, const SusConfig& config,
                      const char* where = "subset simulation");

// Generates the next conditional level: selects the p0*n seeds above the
// new threshold, shuffles them on a dedicated stream, and grows one chain
// of length 1/p0 per seed. Fills the previous level's gamma/delta.
LevelRecord advance_level(LevelRecord& prev, const SusConfig& config,
                          const DrivingFn& driving, const ProposalSpec& proposal,
                          const RngFactory& rng, const ExecPolicy& exec = {});

// Conditional level at an explicit threshold. Every sample above it
// qualifies as a seed; after the shuffle the first p0*n spawn chains.
// Used for the clamped final level of the original formulation, where
// more than p0*n samples may already sit above zero.
LevelRecord advance_level_at(LevelRecord& prev, double threshold,
                             const SusConfig& config, const DrivingFn& driving,
                             const ProposalSpec& proposal, const RngFactory& rng,
                             const ExecPolicy& exec = {},
                             const char* where = "subset simulation");

CcdfCurve assemble_ccdf(const std::vector<LevelRecord>& levels, const SusConfig& config);

// Lag-k indicator correlations of a level's chains against threshold b,
// biased (divide-by-total) normalization, clipped below at zero.
std::vector<double> indicator_correlations(const LevelRecord& level, double b);

// gamma = 2 * sum_k (1 - k p0) rho_k over lags 1..1/p0-1.
double gamma_factor(const std::vector<double>& rho, double p0);

// Per-level and pooled c.o.v. of the exceedance estimate at the last
// threshold. A single-level run reports the direct Monte Carlo binomial
// c.o.v. at p0.
CovEstimate estimate_cov(const std::vector<LevelRecord>& levels, const SusConfig& config);

// c.o.v. of the pooled CCDF estimate at each curve point: transition-level
// contributions below the point's level plus the in-level binomial term
// with the correlation factor at that point's threshold.
std::vector<double> pointwise_cov(const std::vector<LevelRecord>& levels,
                                  const CcdfCurve& curve, const SusConfig& config);

}  // namespace rarebayes
