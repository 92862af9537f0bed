#include "rarebayes/bus.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rarebayes/errors.hpp"

namespace rarebayes {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double evaluate_driving(const LogLikelihoodModel& model, const PriorSpec& prior,
                        const StateVector& state) {
  double ll = model.log_likelihood(to_physical(state, prior));
  if (ll == -kInf) return -kInf;
  return ll + aux_log_inv_uniform(state);
}

DrivingFn make_revised_driving(const LogLikelihoodModel& model, const PriorSpec& prior) {
  return [&model, &prior](const StateVector& s) { return evaluate_driving(model, prior, s); };
}

DrivingFn make_original_driving(const LogLikelihoodModel& model, const PriorSpec& prior,
                                double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("original driving: c must be finite and positive");
  return [&model, &prior, c](const StateVector& s) {
    return c * std::exp(model.log_likelihood(to_physical(s, prior))) - aux_uniform(s);
  };
}

void StoppingConfig::validate() const {
  if (!(tol > 0.0 && tol < 1.0))
    throw std::invalid_argument("stopping: tol must lie in (0,1)");
  inner_sus().validate();
  double resolution = static_cast<double>(inner_max_levels) * std::log(1.0 / inner_p0);
  if (resolution < std::log(1.0 / tol))
    throw std::invalid_argument(
        "stopping: inner level cap cannot resolve tol (need cap * ln(1/p0) >= ln(1/tol))");
  if (!(inner_width >= 0.0) || !std::isfinite(inner_width))
    throw std::invalid_argument("stopping: inner width must be finite and non-negative");
}

SusConfig StoppingConfig::inner_sus() const {
  SusConfig cfg;
  cfg.p0 = inner_p0;
  cfg.n = inner_n;
  cfg.max_levels = inner_max_levels;
  return cfg;
}

namespace {

// The region {ln L > t} shrinks geometrically as t climbs toward the
// likelihood supremum; a fixed proposal width freezes the chains long
// before the level cap. The marginal spread of the qualifying pool
// misses thin curved level sets, so a scalar feedback factor tuned on
// the observed move rate rides on top of the pool widths.
ProposalSpec inner_proposal(const LevelRecord& level, double t, double base_width,
                            double scale) {
  std::vector<const StateVector*> pool;
  for (std::size_t i = 0; i < level.y.size(); ++i)
    if (level.y[i] > t) pool.push_back(&level.states[i]);
  ProposalSpec prop;
  prop.width = scale * base_width;
  if (pool.empty()) return prop;
  const std::size_t dim = pool.front()->size();
  prop.component_widths.resize(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    double mean = 0.0;
    for (const StateVector* s : pool) mean += s->u[c];
    mean /= static_cast<double>(pool.size());
    double var = 0.0;
    for (const StateVector* s : pool) {
      double d = s->u[c] - mean;
      var += d * d;
    }
    var /= static_cast<double>(pool.size());
    double sd = std::sqrt(var);
    prop.component_widths[c] =
        scale * (sd > 0.0 ? std::min(base_width, 3.0 * sd) : base_width);
  }
  return prop;
}

}  // namespace

InadmissibilityEstimate inner_inadmissibility(const LogLikelihoodModel& model,
                                              const PriorSpec& prior, double b,
                                              const StoppingConfig& stopping,
                                              const RngFactory& rng,
                                              const ExecPolicy& exec) {
  SusConfig cfg = stopping.inner_sus();
  // The auxiliary coordinate rides along unused; the driving variable is
  // the log-likelihood alone.
  DrivingFn driving = [&model, &prior](const StateVector& s) {
    return model.log_likelihood(to_physical(s, prior));
  };
  double n = static_cast<double>(cfg.n);
  double base = (1.0 - cfg.p0) / (cfg.p0 * n);
  // Levels after which the estimator's resolution is already below tol.
  // Climbing further serves no decision and near the likelihood supremum
  // ln L collapses to exact ties at double precision.
  const std::size_t resolve_levels = static_cast<std::size_t>(
      std::ceil(std::log(1.0 / stopping.tol) / std::log(1.0 / cfg.p0) - 1e-9));
  try {
    std::vector<LevelRecord> levels;
    levels.push_back(run_level_zero(cfg, driving, prior, rng, exec));
    double scale = 1.0;  // product of observed transition fractions, p0^i without ties
    double scale_w = 1.0;
    std::uint64_t attempts = 0;
    for (std::size_t i = 0;; ++i) {
      std::size_t above = 0;
      for (double y : levels[i].y)
        if (y > b) ++above;
      bool at_cap = i >= cfg.max_levels || i >= resolve_levels;
      if (above >= cfg.seeds_per_level() || at_cap) {
        if (above == 0) return {0.0, 0.0, i + 1};
        double p_here = static_cast<double>(above) / n;
        double d2 = 0.0;
        for (std::size_t j = 0; j + 1 <= i; ++j) {
          double g = gamma_factor(
              indicator_correlations(levels[j], levels[j + 1].threshold), cfg.p0);
          d2 += base * (1.0 + g);
        }
        if (above < cfg.n) {
          double g = gamma_factor(indicator_correlations(levels[i], b), cfg.p0);
          d2 += (1.0 - p_here) / (p_here * n) * (1.0 + g);
        }
        return {scale * p_here, std::sqrt(d2), i + 1};
      }
      double t = next_threshold(levels[i], cfg, "inner inadmissibility run");
      // Move rate persistently near zero means every proposal steps off
      // the current level set; the run degenerates into tied repeats.
      // Narrow, redo the advance on a fresh stream, and carry the scale
      // into the next level. Retries are bounded so a genuinely stuck
      // run still reaches the plateau guard.
      LevelRecord next;
      for (int attempt = 0;; ++attempt) {
        ProposalSpec prop = inner_proposal(levels[i], t, stopping.inner_width, scale_w);
        next = advance_level_at(levels[i], t, cfg, driving, prop,
                                rng.subfactory(rngdomain::kAdapt, attempts++), exec,
                                "inner inadmissibility run");
        double alpha = next.stats.acceptance_rate();
        if (alpha >= 0.05 || attempt >= 4) {
          if (alpha < 0.2)
            scale_w *= std::max(alpha / 0.3, 0.2);
          else if (alpha > 0.5)
            scale_w = std::min(1.0, 2.0 * scale_w);
          break;
        }
        scale_w *= std::max(alpha / 0.3, 0.1);
      }
      levels.push_back(std::move(next));
      std::size_t crossed = 0;
      for (double y : levels[i].y)
        if (y > t) ++crossed;
      scale *= static_cast<double>(crossed) / n;
    }
  } catch (const PlateauError& e) {
    throw PlateauError("inner inadmissibility run", e.level());
  }
}

BusResult run_bus(const LogLikelihoodModel& model, const PriorSpec& prior,
                  const SusConfig& config, const ProposalSpec& proposal,
                  const StoppingConfig& stopping, const ExecPolicy& exec) {
  config.validate();
  proposal.validate();
  stopping.validate();
  if (prior.dim() != model.dim())
    throw std::invalid_argument("run_bus: prior dimension does not match the model");

  RngFactory rng(config.seed);
  DrivingFn driving = make_revised_driving(model, prior);
  BusResult out;
  out.tol = stopping.tol;
  out.levels.push_back(run_level_zero(config, driving, prior, rng, exec));
  for (std::size_t i = 1; i <= config.max_levels; ++i) {
    out.levels.push_back(
        advance_level(out.levels.back(), config, driving, proposal, rng, exec));
    const LevelRecord& level = out.levels.back();
    InadmissibilityEstimate inner = inner_inadmissibility(
        model, prior, level.threshold, stopping,
        rng.subfactory(rngdomain::kInner, i), exec);
    out.a_sequence.push_back(inner.a);
    out.a_cov_sequence.push_back(inner.cov);
    if (inner.a <= stopping.tol) {
      out.evidence.stopping_level = i;
      out.evidence.b_m = level.threshold;
      out.evidence.ln_evidence =
          level.threshold + static_cast<double>(i) * std::log(config.p0);
      out.evidence.cov_proxy = estimate_cov(out.levels, config).delta;
      out.ccdf = assemble_ccdf(out.levels, config);
      out.posterior.source_level = i;
      out.posterior.b_m = level.threshold;
      out.posterior.a_m = inner.a;
      out.posterior.theta.reserve(level.states.size());
      for (const StateVector& s : level.states)
        out.posterior.theta.push_back(to_physical(s, prior));
      return out;
    }
  }
  std::vector<double> thresholds;
  for (const LevelRecord& l : out.levels) thresholds.push_back(l.threshold);
  throw StoppingExhaustedError(config.max_levels, out.a_sequence, thresholds);
}

double posterior_expectation(const PosteriorSampleSet& samples,
                             const std::function<double(std::span<const double>)>& r) {
  if (samples.theta.empty())
    throw std::invalid_argument("posterior_expectation: empty sample set");
  double acc = 0.0;
  for (const auto& row : samples.theta) acc += r(row);
  return acc / static_cast<double>(samples.theta.size());
}

OriginalBusResult run_bus_original(const LogLikelihoodModel& model, const PriorSpec& prior,
                                   double c, const SusConfig& config,
                                   const ProposalSpec& proposal, const ExecPolicy& exec) {
  config.validate();
  proposal.validate();
  if (prior.dim() != model.dim())
    throw std::invalid_argument("run_bus_original: prior dimension does not match the model");
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("run_bus_original: c must be finite and positive");

  RngFactory rng(config.seed);
  DrivingFn driving = make_original_driving(model, prior, c);
  OriginalBusResult out;
  out.c = c;
  double n = static_cast<double>(config.n);
  std::vector<LevelRecord>& levels = out.levels;
  levels.push_back(run_level_zero(config, driving, prior, rng, exec));
  for (std::size_t i = 1; i <= config.max_levels; ++i) {
    double b = next_threshold(levels.back(), config, "original formulation");
    bool clamped = b >= 0.0;
    if (clamped) b = 0.0;
    levels.push_back(advance_level_at(levels.back(), b, config, driving, proposal,
                                      rng, exec, "original formulation"));
    if (!clamped) continue;

    const LevelRecord& prev = levels[levels.size() - 2];
    std::size_t above = 0;
    for (double y : prev.y)
      if (y > 0.0) ++above;
    double p_last = static_cast<double>(above) / n;
    out.p_y_positive =
        std::pow(config.p0, static_cast<double>(i - 1)) * p_last;
    out.ln_evidence = std::log(out.p_y_positive) - std::log(c);
    out.final_level = i;

    double base = (1.0 - config.p0) / (config.p0 * n);
    double d2 = 0.0;
    for (std::size_t j = 0; j + 2 < levels.size(); ++j) {
      double g = gamma_factor(
          indicator_correlations(levels[j], levels[j + 1].threshold), config.p0);
      d2 += base * (1.0 + g);
    }
    if (above < config.n) {
      double g = gamma_factor(indicator_correlations(prev, 0.0), config.p0);
      d2 += (1.0 - p_last) / (p_last * n) * (1.0 + g);
    }
    out.cov_proxy = std::sqrt(d2);

    out.ccdf = assemble_ccdf(levels, config);
    const LevelRecord& final_level = levels.back();
    out.posterior.source_level = i;
    out.posterior.b_m = 0.0;
    out.posterior.a_m = 0.0;
    out.posterior.theta.reserve(final_level.states.size());
    for (const StateVector& s : final_level.states)
      out.posterior.theta.push_back(to_physical(s, prior));
    return out;
  }
  std::vector<double> thresholds;
  for (const LevelRecord& l : levels) thresholds.push_back(l.threshold);
  throw StoppingExhaustedError(config.max_levels, {}, thresholds);
}

double fit_tail_slope(const CcdfCurve& curve, double lo, double hi) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const CcdfPoint& pt : curve.points) {
    if (pt.b > lo && pt.b <= hi && std::isfinite(pt.b) && std::isfinite(pt.ln_p)) {
      xs.push_back(pt.b);
      ys.push_back(pt.ln_p);
    }
  }
  if (xs.size() < 5)
    throw std::invalid_argument("fit_tail_slope: fewer than five points in the window");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_tail_slope: degenerate window");
  return sxy / sxx;
}

}  // namespace rarebayes
