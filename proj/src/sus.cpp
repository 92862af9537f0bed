#include "rarebayes/sus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rarebayes/errors.hpp"
#include "rarebayes/parallel.hpp"

namespace rarebayes {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_integral(double x) { return std::abs(x - std::round(x)) < 1e-9; }
}  // namespace

void SusConfig::validate() const {
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("sus: p0 must lie in (0,1)");
  if (!is_integral(p0 * static_cast<double>(n)))
    throw std::invalid_argument("sus: p0 * n must be an integer");
  if (!is_integral(1.0 / p0))
    throw std::invalid_argument("sus: 1 / p0 must be an integer");
  if (n < 100) throw std::invalid_argument("sus: n must be at least 100");
  if (max_levels < 1) throw std::invalid_argument("sus: max_levels must be at least 1");
}

std::size_t SusConfig::seeds_per_level() const {
  return static_cast<std::size_t>(std::llround(p0 * static_cast<double>(n)));
}

std::size_t SusConfig::chain_length() const {
  return static_cast<std::size_t>(std::llround(1.0 / p0));
}

LevelRecord run_level_zero(const SusConfig& config, const DrivingFn& driving,
                           const PriorSpec& prior, const RngFactory& rng,
                           const ExecPolicy& exec) {
  LevelRecord level;
  level.level = 0;
  level.threshold = -kInf;
  level.chain_length = 1;
  level.gamma = kNaN;
  level.delta = kNaN;
  level.states.resize(config.n);
  level.y.resize(config.n);
  parallel_for(config.n, exec.threads, [&](std::size_t k) {
    RngStream stream = rng.stream(rngdomain::kLevelZero, k);
    StateVector s = sample_prior(prior, stream);
    double y;
    try {
      y = driving(s);
    } catch (const std::exception& e) {
      throw ModelError("level 0 sample " + std::to_string(k) + ": " + e.what());
    }
    if (std::isnan(y) || y == kInf)
      throw ModelError("level 0 sample " + std::to_string(k) +
                       ": driving variable returned NaN or +inf");
    level.states[k] = std::move(s);
    level.y[k] = y;
  });
  level.stats.y_evaluations = config.n;
  return level;
}

double next_threshold(const LevelRecord& level, const SusConfig& config,
                      const char* where) {
  std::vector<double> sorted = level.y;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::size_t seeds = config.seeds_per_level();
  if (sorted.size() <= seeds)
    throw std::invalid_argument("next_threshold: level smaller than seed count");
  double b = sorted[seeds];  // the (p0*n + 1)-th largest
  // Chain repeats can tie across the rank boundary; that only thins the
  // seed pool. Degeneracy is nothing strictly above b or no progress.
  if (!(sorted.front() > b)) throw PlateauError(where, level.level + 1);
  if (!(b > level.threshold)) throw PlateauError(where, level.level + 1);
  return b;
}

LevelRecord advance_level(LevelRecord& prev, const SusConfig& config,
                          const DrivingFn& driving, const ProposalSpec& proposal,
                          const RngFactory& rng, const ExecPolicy& exec) {
  double b = next_threshold(prev, config);
  return advance_level_at(prev, b, config, driving, proposal, rng, exec);
}

LevelRecord advance_level_at(LevelRecord& prev, double b, const SusConfig& config,
                             const DrivingFn& driving, const ProposalSpec& proposal,
                             const RngFactory& rng, const ExecPolicy& exec,
                             const char* where) {
  int new_level = prev.level + 1;
  std::size_t seeds = config.seeds_per_level();
  std::size_t length = config.chain_length();

  std::vector<std::size_t> seed_idx;
  seed_idx.reserve(seeds);
  for (std::size_t i = 0; i < prev.y.size(); ++i)
    if (prev.y[i] > b) seed_idx.push_back(i);
  if (seed_idx.empty()) throw PlateauError(where, new_level);

  // Fisher-Yates on its own stream so chain placement never alters the
  // randomness any chain consumes.
  RngStream shuffle = rng.stream(rngdomain::kShuffle, static_cast<std::uint64_t>(new_level));
  for (std::size_t i = seed_idx.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(shuffle.next_u64() % i);
    std::swap(seed_idx[i - 1], seed_idx[j]);
  }
  // Ties at the threshold can leave fewer qualifying samples than chains;
  // cycle the shuffled pool so every chain still gets a valid seed.
  const std::size_t pool = seed_idx.size();
  seed_idx.resize(seeds);
  for (std::size_t c = pool; c < seeds; ++c) seed_idx[c] = seed_idx[c % pool];

  LevelRecord level;
  level.level = new_level;
  level.threshold = b;
  level.chain_length = length;
  level.gamma = kNaN;
  level.delta = kNaN;
  level.states.resize(seeds * length);
  level.y.resize(seeds * length);
  std::vector<ChainStats> stats(seeds);
  parallel_for(seeds, exec.threads, [&](std::size_t c) {
    RngStream stream = rng.stream(rngdomain::kChain,
                                  static_cast<std::uint64_t>(new_level), c);
    ChainResult chain = run_chain(prev.states[seed_idx[c]], prev.y[seed_idx[c]], b,
                                  length, driving, proposal, stream);
    for (std::size_t t = 0; t < length; ++t) {
      level.states[c * length + t] = std::move(chain.states[t]);
      level.y[c * length + t] = chain.y[t];
    }
    stats[c] = chain.stats;
  });
  for (const auto& s : stats) level.stats.merge(s);

  std::vector<double> rho = indicator_correlations(prev, b);
  prev.gamma = gamma_factor(rho, config.p0);
  double prev_delta2 = (1.0 - config.p0) / (config.p0 * static_cast<double>(config.n)) *
                       (1.0 + prev.gamma);
  prev.delta = std::sqrt(prev_delta2);
  return level;
}

CcdfCurve assemble_ccdf(const std::vector<LevelRecord>& levels, const SusConfig& config) {
  if (levels.empty()) throw std::invalid_argument("assemble_ccdf: no levels");
  CcdfCurve curve;
  double n = static_cast<double>(config.n);
  double level_scale = 1.0;
  double level_ln_scale = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0) {
      std::size_t above = 0;
      for (double y : levels[i - 1].y)
        if (y > levels[i].threshold) ++above;
      double frac = static_cast<double>(above) / n;
      level_scale *= frac;
      level_ln_scale += std::log(frac);
    }
    bool last = (i + 1 == levels.size());
    double window_hi = last ? kInf : levels[i + 1].threshold;

    CcdfPoint boundary;
    boundary.b = levels[i].threshold;
    boundary.p = level_scale;
    boundary.ln_p = level_ln_scale;
    boundary.v = boundary.b + boundary.ln_p;
    boundary.level = static_cast<int>(i);
    curve.points.push_back(boundary);

    std::vector<double> sorted = levels[i].y;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 1; k <= sorted.size(); ++k) {
      double b = sorted[k - 1];
      if (!(b > levels[i].threshold)) continue;  // -inf draws sit on the boundary
      if (!(b < window_hi)) break;
      if (k < sorted.size() && sorted[k] == b) continue;  // tie: keep largest rank
      if (k == sorted.size()) continue;                   // empirical exceedance zero
      double frac = (n - static_cast<double>(k)) / n;
      CcdfPoint pt;
      pt.b = b;
      pt.p = level_scale * frac;
      pt.ln_p = level_ln_scale + std::log(frac);
      pt.v = pt.b + pt.ln_p;
      pt.level = static_cast<int>(i);
      curve.points.push_back(pt);
    }
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (!(curve.points[i].b > curve.points[i - 1].b))
      throw std::logic_error("assemble_ccdf: pooled thresholds not strictly increasing");
    if (curve.points[i].p > curve.points[i - 1].p)
      throw std::logic_error("assemble_ccdf: pooled probabilities increase");
  }
  return curve;
}

std::vector<double> indicator_correlations(const LevelRecord& level, double b) {
  std::size_t t_len = level.chain_length;
  if (t_len <= 1) return {};
  std::size_t chains = level.chain_count();
  std::size_t total = chains * t_len;
  std::vector<unsigned char> ind(total);
  double sum = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    ind[i] = level.y[i] > b ? 1 : 0;
    sum += ind[i];
  }
  double p_bar = sum / static_cast<double>(total);
  double r0 = p_bar * (1.0 - p_bar);
  std::vector<double> rho(t_len - 1, 0.0);
  if (r0 <= 0.0) return rho;
  for (std::size_t k = 1; k < t_len; ++k) {
    double acc = 0.0;
    for (std::size_t c = 0; c < chains; ++c) {
      const unsigned char* row = ind.data() + c * t_len;
      for (std::size_t t = 0; t + k < t_len; ++t) acc += row[t] * row[t + k];
    }
    double rk = acc / static_cast<double>(total) - p_bar * p_bar;
    rho[k - 1] = std::max(0.0, rk / r0);
  }
  return rho;
}

double gamma_factor(const std::vector<double>& rho, double p0) {
  double acc = 0.0;
  for (std::size_t k = 1; k <= rho.size(); ++k)
    acc += (1.0 - static_cast<double>(k) * p0) * rho[k - 1];
  return 2.0 * acc;
}

CovEstimate estimate_cov(const std::vector<LevelRecord>& levels, const SusConfig& config) {
  if (levels.empty()) throw std::invalid_argument("estimate_cov: no levels");
  CovEstimate out;
  double base = (1.0 - config.p0) / (config.p0 * static_cast<double>(config.n));
  if (levels.size() == 1) {
    // Single level: plain Monte Carlo, binomial c.o.v. at the level
    // probability.
    out.gamma_i.push_back(0.0);
    out.delta_i.push_back(std::sqrt(base));
    out.delta = out.delta_i.back();
    return out;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    std::vector<double> rho = indicator_correlations(levels[i], levels[i + 1].threshold);
    double gamma = gamma_factor(rho, config.p0);
    double d2 = base * (1.0 + gamma);
    out.gamma_i.push_back(gamma);
    out.delta_i.push_back(std::sqrt(d2));
    acc += d2;
  }
  out.delta = std::sqrt(acc);
  return out;
}

std::vector<double> pointwise_cov(const std::vector<LevelRecord>& levels,
                                  const CcdfCurve& curve, const SusConfig& config) {
  CovEstimate per_level = estimate_cov(levels, config);
  std::vector<double> prefix(levels.size(), 0.0);  // sum of delta_i^2 below level i
  for (std::size_t i = 1; i < levels.size(); ++i) {
    double d = (i - 1) < per_level.delta_i.size() ? per_level.delta_i[i - 1] : 0.0;
    prefix[i] = prefix[i - 1] + d * d;
  }
  double n = static_cast<double>(config.n);
  std::vector<double> cov(curve.points.size(), 0.0);
  for (std::size_t idx = 0; idx < curve.points.size(); ++idx) {
    const CcdfPoint& pt = curve.points[idx];
    const LevelRecord& level = levels[static_cast<std::size_t>(pt.level)];
    std::size_t above = 0;
    for (double y : level.y)
      if (y > pt.b) ++above;
    double d2 = prefix[static_cast<std::size_t>(pt.level)];
    if (above > 0 && above < level.y.size()) {
      double p_cond = static_cast<double>(above) / n;
      double gamma = gamma_factor(indicator_correlations(level, pt.b), config.p0);
      d2 += (1.0 - p_cond) / (p_cond * n) * (1.0 + gamma);
    }
    cov[idx] = std::sqrt(d2);
  }
  return cov;
}

}  // namespace rarebayes
