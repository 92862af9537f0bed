#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rarebayes/bus.hpp"
#include "rarebayes/mcmc.hpp"
#include "rarebayes/models.hpp"
#include "rarebayes/priors.hpp"
#include "rarebayes/sus.hpp"

namespace rarebayes {

enum class RunMode {
  kUpdate,
  kCompare,
  kDemoBias,
  kValidate,
};

std::string to_string(RunMode mode);

// One [model] block plus its matching [prior] block.
struct ModelConfig {
  std::string label;  // empty for the unlabeled single-model form
  std::string name;   // gaussian_conjugate | shear_identifiable | shear_unidentifiable
  std::optional<std::uint64_t> seed;

  // gaussian
  std::vector<double> data;
  double noise_std = 1.0;

  // shear frame
  ShearFrameSpec shear;

  PriorSpec prior;

  bool operator==(const ModelConfig&) const = default;
};

struct DemoBiasConfig {
  std::vector<double> multipliers = {1.0};
  bool relative_to_cmax = true;  // multipliers scale c_max; false means absolute c
  std::size_t oracle_count = 5000;

  bool operator==(const DemoBiasConfig&) const = default;
};

struct ValidateConfig {
  std::size_t oracle_count = 5000;
  std::size_t mc_count = 100000;

  bool operator==(const ValidateConfig&) const = default;
};

struct RunConfig {
  RunMode mode = RunMode::kUpdate;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  SusConfig sus;
  ProposalSpec proposal;
  StoppingConfig stopping;

  std::vector<ModelConfig> models;

  DemoBiasConfig demo_bias;
  ValidateConfig validate_opts;

  void validate() const;  // throws ConfigError

  bool operator==(const RunConfig&) const = default;
};

// Parses the key = value config grammar. Errors carry the offending line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical textual form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

}  // namespace rarebayes
