#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>

#include "doctest.h"
#include "rarebayes/errors.hpp"
#include "rarebayes/rng.hpp"
#include "rarebayes/run.hpp"

using namespace rarebayes;

namespace {

LevelRecord table_level(int level, double threshold) {
  LevelRecord rec;
  rec.level = level;
  rec.threshold = threshold;
  return rec;
}

}  // namespace

TEST_CASE("evolution table formats levels with aligned columns") {
  BusResult result;
  result.levels.push_back(table_level(0, -std::numeric_limits<double>::infinity()));
  result.levels.push_back(table_level(1, -2.5));
  result.levels.push_back(table_level(2, 0.125));
  result.a_sequence = {0.533, 0.0031};

  const std::string expected =
      "level           b_k           c_k           a_k\n"
      "    0          -inf           inf              \n"
      "    1    -2.500e+00     1.218e+01    5.3300e-01\n"
      "    2     1.250e-01     8.825e-01    3.1000e-03\n";
  CHECK(evolution_table(result) == expected);
}

TEST_CASE("evolution table leaves the a column empty past the sequence") {
  BusResult result;
  result.levels.push_back(table_level(0, -std::numeric_limits<double>::infinity()));
  result.levels.push_back(table_level(1, 1.0));
  result.levels.push_back(table_level(2, 2.0));
  result.a_sequence = {0.25};

  const std::string table = evolution_table(result);
  CHECK(table.find("2.5000e-01") != std::string::npos);
  const auto last_row = table.rfind("    2  ");
  REQUIRE(last_row != std::string::npos);
  const std::string row = table.substr(last_row);
  CHECK(row == "    2     2.000e+00     1.353e-01              \n");
}

TEST_CASE("evolution table with only level zero has no a entries") {
  BusResult result;
  result.levels.push_back(table_level(0, -std::numeric_limits<double>::infinity()));

  const std::string table = evolution_table(result);
  CHECK(table ==
        "level           b_k           c_k           a_k\n"
        "    0          -inf           inf              \n");
}

TEST_CASE("explicit thread count wins over the environment") {
  setenv("RAREBAYES_THREADS", "7", 1);
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(1) == 1);
  unsetenv("RAREBAYES_THREADS");
}

TEST_CASE("environment thread count applies when no explicit request") {
  setenv("RAREBAYES_THREADS", "7", 1);
  CHECK(resolve_threads(std::nullopt) == 7);
  unsetenv("RAREBAYES_THREADS");
  CHECK(resolve_threads(std::nullopt) == 1);
}

TEST_CASE("invalid thread counts are rejected") {
  CHECK_THROWS_AS(resolve_threads(0), ConfigError);
  CHECK_THROWS_AS(resolve_threads(-2), ConfigError);

  setenv("RAREBAYES_THREADS", "abc", 1);
  CHECK_THROWS_AS(resolve_threads(std::nullopt), ConfigError);
  setenv("RAREBAYES_THREADS", "0", 1);
  CHECK_THROWS_AS(resolve_threads(std::nullopt), ConfigError);
  setenv("RAREBAYES_THREADS", "-3", 1);
  CHECK_THROWS_AS(resolve_threads(std::nullopt), ConfigError);
  setenv("RAREBAYES_THREADS", "4x", 1);
  CHECK_THROWS_AS(resolve_threads(std::nullopt), ConfigError);
  setenv("RAREBAYES_THREADS", "", 1);
  CHECK_THROWS_AS(resolve_threads(std::nullopt), ConfigError);
  unsetenv("RAREBAYES_THREADS");
}

TEST_CASE("compare seeds use an explicit model seed or derive from the run seed") {
  RunConfig config;
  config.seed = 20170317;

  ModelConfig first;
  first.label = "A";
  first.name = "shear_identifiable";
  first.seed = 123;
  config.models.push_back(first);

  ModelConfig second;
  second.label = "B";
  second.name = "shear_unidentifiable";
  config.models.push_back(second);

  CHECK(compare_model_seed(config, 0) == 123);
  CHECK(compare_model_seed(config, 1) == mix_key(20170317, rngdomain::kCompare, 1, 0));
  CHECK(compare_model_seed(config, 1) != compare_model_seed(config, 0));

  config.models[0].seed.reset();
  CHECK(compare_model_seed(config, 0) == mix_key(20170317, rngdomain::kCompare, 0, 0));
  CHECK(compare_model_seed(config, 0) != compare_model_seed(config, 1));
}

TEST_CASE("build_model dispatches on the model name") {
  ModelConfig gaussian;
  gaussian.name = "gaussian_conjugate";
  gaussian.data = {1.0};
  gaussian.noise_std = 0.2;
  const auto g = build_model(gaussian);
  REQUIRE(g != nullptr);
  CHECK(g->dim() == 1);
  CHECK(g->name() == "gaussian_conjugate");
  const GaussianConjugateModel direct({1.0}, 0.2);
  const std::vector<double> theta = {1.2};
  CHECK(g->log_likelihood(theta) == direct.log_likelihood(theta));

  ModelConfig identifiable;
  identifiable.name = "shear_identifiable";
  const auto m1 = build_model(identifiable);
  REQUIRE(m1 != nullptr);
  CHECK(m1->dim() == 2);
  CHECK(m1->name() == "shear_identifiable");

  ModelConfig unidentifiable;
  unidentifiable.name = "shear_unidentifiable";
  unidentifiable.shear.scale_masses = true;
  const auto m2 = build_model(unidentifiable);
  REQUIRE(m2 != nullptr);
  CHECK(m2->dim() == 4);
  CHECK(m2->name() == "shear_unidentifiable");
}

TEST_CASE("build_model rejects unknown names") {
  ModelConfig bad;
  bad.name = "frame";
  CHECK_THROWS_AS(build_model(bad), ConfigError);
  try {
    build_model(bad);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unknown model 'frame'") != std::string::npos);
  }
}
