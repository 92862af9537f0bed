#pragma once

#include <cstdint>
#include <vector>

#include "rarebayes/mcmc.hpp"
#include "rarebayes/models.hpp"
#include "rarebayes/priors.hpp"
#include "rarebayes/sus.hpp"

namespace rarebayes {

// Driving variable of the revised formulation, Y = ln L(theta) + ln(1/U),
// with U carried by the last state coordinate.
double evaluate_driving(const LogLikelihoodModel& model, const PriorSpec& prior,
                        const StateVector& state);

DrivingFn make_revised_driving(const LogLikelihoodModel& model, const PriorSpec& prior);

// Driving variable of the original formulation, Y = c L(theta) - U.
DrivingFn make_original_driving(const LogLikelihoodModel& model, const PriorSpec& prior,
                                double c);

// Inner run over theta alone (driving ln L, no auxiliary term) targeting a
// fixed threshold.
struct StoppingConfig {
  double tol = 1e-8;
  double inner_p0 = 0.1;
  std::size_t inner_n = 1000;
  std::size_t inner_max_levels = 10;
  double inner_width = 1.0;

  // Also checks that the inner run can resolve tol:
  // inner_max_levels * ln(1/p0) >= ln(1/tol).
  void validate() const;

  SusConfig inner_sus() const;

  bool operator==(const StoppingConfig&) const = default;
};

struct InadmissibilityEstimate {
  double a = 0.0;    // prior probability of {ln L > b}
  double cov = 0.0;  // c.o.v. of the estimate; 0 for the exact-zero case
  std::size_t levels_used = 0;
};

// Estimates a_k = P_prior(ln L(theta) > b). Returns exactly zero when the
// level cap is exhausted below b, i.e. the probability is below the run's
// resolution p0^cap.
InadmissibilityEstimate inner_inadmissibility(const LogLikelihoodModel& model,
                                              const PriorSpec& prior, double b,
                                              const StoppingConfig& stopping,
                                              const RngFactory& rng,
                                              const ExecPolicy& exec = {});

struct EvidenceEstimate {
  double ln_evidence = 0.0;  // b_m + m ln p0
  double cov_proxy = 0.0;    // c.o.v. of the exceedance estimate at b_m
  std::size_t stopping_level = 0;
  double b_m = 0.0;
};

struct PosteriorSampleSet {
  std::vector<std::vector<double>> theta;  // physical space, one row per sample
  std::size_t source_level = 0;
  double b_m = 0.0;
  double a_m = 0.0;
};

struct BusResult {
  std::vector<LevelRecord> levels;  // 0..m
  CcdfCurve ccdf;
  EvidenceEstimate evidence;
  PosteriorSampleSet posterior;
  std::vector<double> a_sequence;      // a_1..a_m
  std::vector<double> a_cov_sequence;  // inner c.o.v. per entry
  double tol = 0.0;
};

// Full revised-formulation run: adaptive outer levels, one inner
// inadmissibility run per threshold, stops at the first a_m <= tol.
// Throws StoppingExhaustedError when the level budget runs out first.
BusResult run_bus(const LogLikelihoodModel& model, const PriorSpec& prior,
                  const SusConfig& config, const ProposalSpec& proposal,
                  const StoppingConfig& stopping, const ExecPolicy& exec = {});

// Monte Carlo posterior expectation of r(theta) over a sample set.
double posterior_expectation(const PosteriorSampleSet& samples,
                             const std::function<double(std::span<const double>)>& r);

struct OriginalBusResult {
  std::vector<LevelRecord> levels;
  CcdfCurve ccdf;
  double c = 0.0;
  double p_y_positive = 0.0;   // estimate of P(Y > 0)
  double ln_evidence = 0.0;    // ln( P(Y > 0) / c )
  double cov_proxy = 0.0;
  std::size_t final_level = 0;
  PosteriorSampleSet posterior;
};

// Original-formulation demonstrator: fixed target threshold zero; the first
// proposed threshold at or above zero is clamped to zero and that level is
// final. Inadmissible c (c > 1/max L) silently truncates the posterior,
// which is exactly what cmd_demo_bias exhibits.
OriginalBusResult run_bus_original(const LogLikelihoodModel& model, const PriorSpec& prior,
                                   double c, const SusConfig& config,
                                   const ProposalSpec& proposal,
                                   const ExecPolicy& exec = {});

// Least-squares slope of ln CCDF vs b over curve points with lo < b <= hi.
// Requires at least five points in the window.
double fit_tail_slope(const CcdfCurve& curve, double lo, double hi);

}  // namespace rarebayes
