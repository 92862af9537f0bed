#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rarebayes/errors.hpp"
#include "rarebayes/sus.hpp"

using namespace rarebayes;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SusConfig small_config(std::size_t n) {
  SusConfig cfg;
  cfg.p0 = 0.1;
  cfg.n = n;
  cfg.max_levels = 10;
  return cfg;
}

LevelRecord level_from_y(std::vector<double> y, std::size_t chain_length = 1,
                         double threshold = -kInf, int lvl = 0) {
  LevelRecord rec;
  rec.level = lvl;
  rec.threshold = threshold;
  rec.chain_length = chain_length;
  rec.y = std::move(y);
  rec.states.resize(rec.y.size());
  for (std::size_t i = 0; i < rec.y.size(); ++i)
    rec.states[i] = StateVector{{rec.y[i]}};
  return rec;
}

}  // namespace

TEST_CASE("config validation and derived sizes") {
  SusConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.seeds_per_level() == 100);
  CHECK(cfg.chain_length() == 10);

  cfg.p0 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.p0 = 0.3;
  cfg.n = 1000;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.p0 = 0.1;
  cfg.n = 1005;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.n = 99;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SusConfig{};
  cfg.max_levels = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SusConfig{};
  cfg.p0 = 0.2;
  cfg.n = 500;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.seeds_per_level() == 100);
  CHECK(cfg.chain_length() == 5);
}

TEST_CASE("next_threshold picks the rank boundary and detects degeneracy") {
  SusConfig cfg = small_config(10);
  LevelRecord rec = level_from_y({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(next_threshold(rec, cfg) == 9.0);

  LevelRecord flat = level_from_y(std::vector<double>(10, 3.0));
  CHECK_THROWS_AS(next_threshold(flat, cfg), PlateauError);

  LevelRecord stuck = level_from_y({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 1, 9.5, 1);
  CHECK_THROWS_AS(next_threshold(stuck, cfg), PlateauError);

  SusConfig tiny = small_config(10);
  LevelRecord short_rec = level_from_y({5.0});
  CHECK_THROWS_AS(next_threshold(short_rec, tiny), std::invalid_argument);
}

TEST_CASE("advance_level_at grows seeded chains above the threshold") {
  SusConfig cfg = small_config(100);
  std::vector<double> y(100);
  for (std::size_t i = 0; i < 100; ++i) y[i] = static_cast<double>(i + 1);
  LevelRecord prev = level_from_y(std::move(y));
  DrivingFn driving = [](const StateVector& s) { return s.u[0]; };
  RngFactory rng(4242);

  LevelRecord next = advance_level_at(prev, 90.5, cfg, driving, ProposalSpec{0.5, {}}, rng);
  CHECK(next.level == 1);
  CHECK(next.threshold == 90.5);
  CHECK(next.chain_length == 10);
  CHECK(next.chain_count() == 10);
  REQUIRE(next.states.size() == 100);
  REQUIRE(next.y.size() == 100);
  for (double v : next.y) CHECK(v > 90.5);
  std::set<double> seeds_used;
  for (std::size_t c = 0; c < 10; ++c) {
    double seed_u = next.states[c * 10].u[0];
    CHECK(seed_u > 90.5);
    CHECK(next.y[c * 10] == seed_u);
    seeds_used.insert(seed_u);
  }
  CHECK(seeds_used.size() == 10);
  CHECK_FALSE(std::isnan(prev.gamma));
  CHECK_FALSE(std::isnan(prev.delta));
  CHECK(prev.gamma == 0.0);
  CHECK(prev.delta == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(std::isnan(next.gamma));
}

TEST_CASE("seed shortfall cycles the qualifying pool") {
  SusConfig cfg = small_config(100);
  std::vector<double> y(100, 0.5);
  y[10] = 91.0;
  y[50] = 92.0;
  y[90] = 93.0;
  LevelRecord prev = level_from_y(std::move(y));
  prev.states[10] = StateVector{{91.0}};
  prev.states[50] = StateVector{{92.0}};
  prev.states[90] = StateVector{{93.0}};
  DrivingFn driving = [](const StateVector& s) { return s.u[0]; };
  RngFactory rng(77);

  LevelRecord next = advance_level_at(prev, 90.5, cfg, driving, ProposalSpec{0.5, {}}, rng);
  CHECK(next.chain_count() == 10);
  std::set<double> seeds_used;
  for (std::size_t c = 0; c < 10; ++c) {
    double seed_u = next.states[c * 10].u[0];
    CHECK((seed_u == 91.0 || seed_u == 92.0 || seed_u == 93.0));
    seeds_used.insert(seed_u);
  }
  CHECK(seeds_used.size() == 3);
  for (double v : next.y) CHECK(v > 90.5);

  CHECK_THROWS_AS(
      advance_level_at(prev, 1000.0, cfg, driving, ProposalSpec{0.5, {}}, rng),
      PlateauError);
}

TEST_CASE("assemble_ccdf pools levels with boundary points") {
  SusConfig cfg = small_config(10);
  std::vector<LevelRecord> levels;
  levels.push_back(level_from_y({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}));
  std::vector<double> y1(10);
  for (std::size_t i = 0; i < 10; ++i) y1[i] = 0.91 + 0.01 * static_cast<double>(i);
  levels.push_back(level_from_y(std::move(y1), 10, 0.9, 1));

  CcdfCurve curve = assemble_ccdf(levels, cfg);
  REQUIRE(curve.points.size() == 19);

  CHECK(curve.points[0].b == -kInf);
  CHECK(curve.points[0].p == 1.0);
  CHECK(curve.points[0].ln_p == 0.0);
  CHECK(curve.points[0].level == 0);

  CHECK(curve.points[1].b == 0.1);
  CHECK(curve.points[1].p == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(curve.points[8].b == 0.8);
  CHECK(curve.points[8].p == doctest::Approx(0.2).epsilon(1e-14));

  CHECK(curve.points[9].b == 0.9);
  CHECK(curve.points[9].p == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(curve.points[9].level == 1);

  const CcdfPoint& mid = curve.points[14];
  CHECK(mid.b == doctest::Approx(0.95).epsilon(1e-14));
  CHECK(mid.p == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(mid.ln_p == doctest::Approx(std::log(0.05)).epsilon(1e-12));
  CHECK(mid.v == doctest::Approx(0.95 + std::log(0.05)).epsilon(1e-12));

  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].b > curve.points[i - 1].b);
    CHECK(curve.points[i].p <= curve.points[i - 1].p);
  }
}

TEST_CASE("assemble_ccdf collapses ties to the largest rank") {
  SusConfig cfg = small_config(4);
  std::vector<LevelRecord> levels;
  levels.push_back(level_from_y({0.1, 0.2, 0.2, 0.3}));
  CcdfCurve curve = assemble_ccdf(levels, cfg);
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points[0].b == -kInf);
  CHECK(curve.points[1].b == 0.1);
  CHECK(curve.points[1].p == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(curve.points[2].b == 0.2);
  CHECK(curve.points[2].p == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(assemble_ccdf({}, cfg), std::invalid_argument);
}

TEST_CASE("indicator correlations on handcrafted chains") {
  LevelRecord single = level_from_y({1, 2, 3}, 1);
  CHECK(indicator_correlations(single, 0.0).empty());

  LevelRecord two = level_from_y({5, 5, 5, 5, 5, 0, 0, 0, 0, 0}, 5, 1.0, 1);
  std::vector<double> rho = indicator_correlations(two, 1.0);
  REQUIRE(rho.size() == 4);
  CHECK(rho[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(rho[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rho[2] == 0.0);
  CHECK(rho[3] == 0.0);

  LevelRecord alt = level_from_y({5, 0, 5, 0}, 4, 1.0, 1);
  std::vector<double> rho2 = indicator_correlations(alt, 1.0);
  REQUIRE(rho2.size() == 3);
  CHECK(rho2[0] == 0.0);
  CHECK(rho2[1] == 0.0);
  CHECK(rho2[2] == 0.0);

  LevelRecord all_above = level_from_y({5, 5, 5, 5}, 2, 1.0, 1);
  std::vector<double> rho3 = indicator_correlations(all_above, 1.0);
  REQUIRE(rho3.size() == 1);
  CHECK(rho3[0] == 0.0);
}

TEST_CASE("gamma factor arithmetic") {
  CHECK(gamma_factor({}, 0.1) == 0.0);
  std::vector<double> ones(9, 1.0);
  CHECK(gamma_factor(ones, 0.1) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(gamma_factor({0.5}, 0.1) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("cov estimate arithmetic") {
  SusConfig cfg;  // p0 = 0.1, n = 1000
  std::vector<LevelRecord> one;
  one.push_back(level_from_y(std::vector<double>(10, 1.0)));
  CovEstimate single = estimate_cov(one, cfg);
  CHECK(single.delta == doctest::Approx(0.09486832980505139).epsilon(1e-15));
  CHECK(single.gamma_i.size() == 1);
  CHECK(single.gamma_i[0] == 0.0);

  std::vector<LevelRecord> three;
  three.push_back(level_from_y({1, 2, 3, 4}));
  three.push_back(level_from_y({5, 5, 5, 5, 0, 0, 0, 0}, 4, 2.5, 1));
  three.push_back(level_from_y({6, 7}, 2, 4.5, 2));
  CovEstimate est = estimate_cov(three, cfg);
  REQUIRE(est.gamma_i.size() == 2);
  CHECK(est.gamma_i[0] == 0.0);
  std::vector<double> rho = indicator_correlations(three[1], 4.5);
  double g1 = gamma_factor(rho, cfg.p0);
  CHECK(est.gamma_i[1] == doctest::Approx(g1).epsilon(1e-12));
  double base = 0.9 / 100.0;
  CHECK(est.delta_i[0] == doctest::Approx(std::sqrt(base)).epsilon(1e-12));
  CHECK(est.delta_i[1] == doctest::Approx(std::sqrt(base * (1.0 + g1))).epsilon(1e-12));
  CHECK(est.delta ==
        doctest::Approx(std::sqrt(base + base * (1.0 + g1))).epsilon(1e-12));
  CHECK_THROWS_AS(estimate_cov({}, cfg), std::invalid_argument);
}

TEST_CASE("run_level_zero draws the prior and reports faults") {
  SusConfig cfg;
  cfg.n = 200;
  PriorSpec prior;
  prior.marginals = {MarginalSpec::standard_normal()};
  DrivingFn driving = [](const StateVector& s) { return s.u[0] + s.u[1]; };
  RngFactory rng(99);
  LevelRecord level = run_level_zero(cfg, driving, prior, rng);
  CHECK(level.level == 0);
  CHECK(level.threshold == -kInf);
  CHECK(level.chain_length == 1);
  CHECK(level.states.size() == 200);
  CHECK(level.stats.y_evaluations == 200);
  CHECK(std::isnan(level.gamma));
  for (std::size_t i = 0; i < level.y.size(); ++i) {
    CHECK(level.states[i].size() == 2);
    CHECK(level.y[i] == level.states[i].u[0] + level.states[i].u[1]);
  }

  DrivingFn broken = [](const StateVector&) { return std::nan(""); };
  CHECK_THROWS_AS(run_level_zero(cfg, broken, prior, rng), ModelError);
}

TEST_CASE("pooled exponential CCDF tracks the analytic curve") {
  // Y = ln(1/U) is standard exponential under the prior, so the true
  // complementary CDF is exp(-b) and every pooled point can be checked
  // against it with its own error estimate.
  SusConfig cfg;  // p0 = 0.1, n = 1000
  PriorSpec prior;  // no physical parameters, aux coordinate only
  DrivingFn driving = [](const StateVector& s) { return aux_log_inv_uniform(s); };
  RngFactory rng(314159);
  ExecPolicy exec{2};

  std::vector<LevelRecord> levels;
  levels.push_back(run_level_zero(cfg, driving, prior, rng, exec));
  for (int i = 0; i < 3; ++i)
    levels.push_back(advance_level(levels.back(), cfg, driving, ProposalSpec{1.0, {}},
                                   rng, exec));
  CcdfCurve curve = assemble_ccdf(levels, cfg);
  std::vector<double> cov = pointwise_cov(levels, curve, cfg);
  REQUIRE(cov.size() == curve.points.size());

  std::size_t checked = 0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const CcdfPoint& pt = curve.points[i];
    if (pt.b == -kInf) continue;
    double err = std::fabs(pt.ln_p + pt.b);
    CHECK(err <= 3.5 * std::max(cov[i], 1e-3));
    ++checked;
  }
  CHECK(checked > 100);
  CHECK(levels.back().threshold > 4.0);
}

TEST_CASE("level generation is identical for any thread count") {
  SusConfig cfg;
  cfg.n = 500;
  PriorSpec prior;
  prior.marginals = {MarginalSpec::standard_normal(), MarginalSpec::standard_normal()};
  DrivingFn driving = [](const StateVector& s) {
    return s.u[0] + 0.3 * s.u[1] + aux_log_inv_uniform(s);
  };

  auto run_with = [&](int threads) {
    RngFactory rng(2718);
    ExecPolicy exec{threads};
    std::vector<LevelRecord> levels;
    levels.push_back(run_level_zero(cfg, driving, prior, rng, exec));
    levels.push_back(
        advance_level(levels.back(), cfg, driving, ProposalSpec{0.8, {}}, rng, exec));
    levels.push_back(
        advance_level(levels.back(), cfg, driving, ProposalSpec{0.8, {}}, rng, exec));
    return levels;
  };

  auto a = run_with(1);
  auto b = run_with(4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].threshold == b[i].threshold);
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].states == b[i].states);
  }
}
