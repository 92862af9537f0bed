#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rarebayes/bus.hpp"
#include "rarebayes/errors.hpp"
#include "rarebayes/normal.hpp"

using namespace rarebayes;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PriorSpec std_prior(std::size_t dim) {
  PriorSpec prior;
  prior.marginals.assign(dim, MarginalSpec::standard_normal());
  return prior;
}

}  // namespace

TEST_CASE("revised driving combines likelihood and auxiliary term") {
  FunctionModel model(1, [](std::span<const double>) { return 0.7; }, 0.7);
  PriorSpec prior = std_prior(1);
  StateVector mid{{0.3, 0.0}};
  CHECK(evaluate_driving(model, prior, mid) ==
        doctest::Approx(0.7 + std::log(2.0)).epsilon(1e-14));
  StateVector deep{{0.3, -20.0}};
  CHECK(evaluate_driving(model, prior, deep) ==
        doctest::Approx(0.7 + 203.91715537109727).epsilon(1e-13));

  FunctionModel impossible(1, [](std::span<const double>) { return -kInf; });
  CHECK(evaluate_driving(impossible, prior, mid) == -kInf);

  DrivingFn fn = make_revised_driving(model, prior);
  CHECK(fn(mid) == evaluate_driving(model, prior, mid));
}

TEST_CASE("original driving is c L minus the uniform") {
  FunctionModel model(1, [](std::span<const double>) { return std::log(0.5); });
  PriorSpec prior = std_prior(1);
  StateVector mid{{0.3, 0.0}};  // U = 0.5
  DrivingFn one = make_original_driving(model, prior, 1.0);
  CHECK(one(mid) == doctest::Approx(0.0).epsilon(1e-14));
  DrivingFn two = make_original_driving(model, prior, 2.0);
  CHECK(two(mid) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(make_original_driving(model, prior, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_original_driving(model, prior, kInf), std::invalid_argument);
}

TEST_CASE("stopping config validation") {
  StoppingConfig s;
  CHECK_NOTHROW(s.validate());
  SusConfig inner = s.inner_sus();
  CHECK(inner.p0 == s.inner_p0);
  CHECK(inner.n == s.inner_n);
  CHECK(inner.max_levels == s.inner_max_levels);

  s.tol = 1e-12;  // needs 12 decades, cap gives 10
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = StoppingConfig{};
  s.tol = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = StoppingConfig{};
  s.tol = 1.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = StoppingConfig{};
  s.inner_width = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = StoppingConfig{};
  s.inner_n = 1005;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("inadmissibility is one when the threshold is below the likelihood range") {
  FunctionModel model(1, [](std::span<const double>) { return 0.0; });
  PriorSpec prior = std_prior(1);
  StoppingConfig stopping;
  RngFactory rng(5);
  InadmissibilityEstimate est = inner_inadmissibility(model, prior, -1.0, stopping, rng);
  CHECK(est.a == 1.0);
  CHECK(est.cov == 0.0);
  CHECK(est.levels_used == 1);
}

TEST_CASE("inadmissibility is exactly zero above a bounded likelihood") {
  FunctionModel model(1, [](std::span<const double> t) { return -t[0] * t[0]; }, 0.0);
  PriorSpec prior = std_prior(1);
  StoppingConfig stopping;
  RngFactory rng(6);
  InadmissibilityEstimate est = inner_inadmissibility(model, prior, 0.0, stopping, rng);
  CHECK(est.a == 0.0);
  CHECK(est.cov == 0.0);
  CHECK(est.levels_used == 9);
}

TEST_CASE("inadmissibility matches the closed form for the conjugate model") {
  GaussianConjugateModel model({1.0}, 0.2);
  PriorSpec prior = std_prior(1);
  StoppingConfig stopping;
  double b_min = model.log_max_likelihood().value();

  auto a_true = [&](double b) {
    double r = 0.2 * std::sqrt(2.0 * (b_min - b));
    return norm_cdf(1.0 + r) - norm_cdf(1.0 - r);
  };

  RngFactory rng1(42);
  InadmissibilityEstimate one = inner_inadmissibility(model, prior, -2.0, stopping, rng1);
  CHECK(one.levels_used == 1);
  CHECK(std::fabs(one.a / a_true(-2.0) - 1.0) <= 3.5 * one.cov);

  RngFactory rng2(43);
  InadmissibilityEstimate two = inner_inadmissibility(model, prior, 0.5, stopping, rng2);
  CHECK(two.levels_used >= 2);
  CHECK(std::fabs(two.a / a_true(0.5) - 1.0) <= 3.5 * two.cov);
}

TEST_CASE("full revised run recovers the conjugate evidence") {
  GaussianConjugateModel model({1.0}, 0.2);
  PriorSpec prior = std_prior(1);
  SusConfig cfg;
  cfg.seed = 7;
  StoppingConfig stopping;
  BusResult out = run_bus(model, prior, cfg, ProposalSpec{1.0, {}}, stopping);

  CHECK(out.tol == stopping.tol);
  REQUIRE(!out.a_sequence.empty());
  CHECK(out.a_sequence.back() <= stopping.tol);
  CHECK(out.a_sequence.size() == out.evidence.stopping_level);
  CHECK(out.a_cov_sequence.size() == out.a_sequence.size());
  CHECK(out.levels.size() == out.evidence.stopping_level + 1);
  for (std::size_t i = 1; i < out.levels.size(); ++i)
    CHECK(out.levels[i].threshold > out.levels[i - 1].threshold);
  CHECK(out.evidence.b_m == out.levels.back().threshold);
  CHECK(out.evidence.ln_evidence ==
        doctest::Approx(out.evidence.b_m +
                        static_cast<double>(out.evidence.stopping_level) * std::log(0.1))
            .epsilon(1e-13));
  CHECK(std::fabs(out.evidence.ln_evidence - model.analytic_log_evidence()) <=
        3.0 * out.evidence.cov_proxy);
  CHECK(out.evidence.cov_proxy > 0.0);
  CHECK(out.evidence.cov_proxy < 1.0);

  REQUIRE(out.posterior.theta.size() == cfg.n);
  CHECK(out.posterior.b_m == out.evidence.b_m);
  CHECK(out.posterior.source_level == out.evidence.stopping_level);
  double mean = posterior_expectation(
      out.posterior, [](std::span<const double> t) { return t[0]; });
  CHECK(std::fabs(mean - model.posterior_mean()[0]) < 0.05);
  double second = posterior_expectation(
      out.posterior, [](std::span<const double> t) { return t[0] * t[0]; });
  double sd = std::sqrt(second - mean * mean);
  CHECK(std::fabs(sd - model.posterior_std()) < 0.05);

  REQUIRE(!out.ccdf.points.empty());
  CHECK(out.ccdf.points.front().b == -kInf);
}

TEST_CASE("posterior expectation arithmetic and guards") {
  PosteriorSampleSet set;
  set.theta = {{1.0}, {2.0}, {3.0}};
  CHECK(posterior_expectation(set, [](std::span<const double> t) { return t[0]; }) ==
        doctest::Approx(2.0).epsilon(1e-15));
  PosteriorSampleSet empty;
  CHECK_THROWS_AS(
      posterior_expectation(empty, [](std::span<const double>) { return 0.0; }),
      std::invalid_argument);
}

TEST_CASE("stopping budget exhaustion carries the partial run") {
  FunctionModel model(1, [](std::span<const double> t) { return 10.0 * t[0]; });
  PriorSpec prior = std_prior(1);
  SusConfig cfg;
  cfg.seed = 11;
  cfg.max_levels = 1;
  StoppingConfig stopping;
  try {
    run_bus(model, prior, cfg, ProposalSpec{1.0, {}}, stopping);
    FAIL("expected StoppingExhaustedError");
  } catch (const StoppingExhaustedError& e) {
    CHECK(e.a_sequence().size() == 1);
    CHECK(e.a_sequence().front() > stopping.tol);
    CHECK(e.thresholds().size() == 2);
  }
}

TEST_CASE("run_bus rejects mismatched dimensions") {
  GaussianConjugateModel model({1.0}, 0.2);
  PriorSpec prior = std_prior(2);
  SusConfig cfg;
  StoppingConfig stopping;
  CHECK_THROWS_AS(run_bus(model, prior, cfg, ProposalSpec{1.0, {}}, stopping),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_bus_original(model, prior, 1.0, cfg, ProposalSpec{1.0, {}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      run_bus_original(model, std_prior(1), 0.0, cfg, ProposalSpec{1.0, {}}),
      std::invalid_argument);
}

TEST_CASE("original formulation with unit likelihood reproduces the prior") {
  FunctionModel model(1, [](std::span<const double>) { return 0.0; }, 0.0);
  PriorSpec prior = std_prior(1);
  SusConfig cfg;
  cfg.seed = 21;
  OriginalBusResult out = run_bus_original(model, prior, 1.0, cfg, ProposalSpec{1.0, {}});
  CHECK(out.c == 1.0);
  CHECK(out.p_y_positive == 1.0);
  CHECK(out.ln_evidence == 0.0);
  CHECK(out.cov_proxy == 0.0);
  CHECK(out.final_level == 1);
  CHECK(out.levels.back().threshold == 0.0);
  REQUIRE(out.posterior.theta.size() == cfg.n);
  double s = 0.0, q = 0.0;
  for (const auto& row : out.posterior.theta) {
    s += row[0];
    q += row[0] * row[0];
  }
  double n = static_cast<double>(out.posterior.theta.size());
  double mean = s / n;
  CHECK(std::fabs(mean) < 0.15);
  CHECK(std::fabs(std::sqrt(q / n - mean * mean) - 1.0) < 0.15);
}

TEST_CASE("tail slope of a synthetic line") {
  CcdfCurve curve;
  CcdfPoint boundary;
  boundary.b = -kInf;
  boundary.ln_p = 0.0;
  curve.points.push_back(boundary);
  for (int k = 1; k <= 10; ++k) {
    CcdfPoint pt;
    pt.b = static_cast<double>(k);
    pt.ln_p = 3.0 - 2.0 * pt.b;
    curve.points.push_back(pt);
  }
  CHECK(fit_tail_slope(curve, 0.0, 20.0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit_tail_slope(curve, 2.5, 7.0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_tail_slope(curve, 5.5, 7.0), std::invalid_argument);
  CcdfCurve empty;
  CHECK_THROWS_AS(fit_tail_slope(empty, 0.0, 1.0), std::invalid_argument);
}
