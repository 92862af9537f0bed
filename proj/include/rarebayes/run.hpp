#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "rarebayes/bus.hpp"
#include "rarebayes/config.hpp"

namespace rarebayes {

std::unique_ptr<LogLikelihoodModel> build_model(const ModelConfig& model);

// Worker count: explicit request, else RAREBAYES_THREADS, else 1.
int resolve_threads(const std::optional<int>& requested);

// Master seed for one model block of a compare run: the block's own seed
// when given, otherwise derived from the run seed and the block index.
std::uint64_t compare_model_seed(const RunConfig& config, std::size_t index);

// Per-level console summary: threshold, its likelihood scale c_k = e^{-b_k},
// and the inadmissibility estimate a_k. Level 0 has no threshold and no a.
std::string evolution_table(const BusResult& result);

// Each command writes its artifacts under config.out_dir and returns a
// process exit code; configuration or runtime faults are thrown, not coded.
int cmd_update(const RunConfig& config, const ExecPolicy& exec, std::ostream& console);
int cmd_compare(const RunConfig& config, const ExecPolicy& exec, std::ostream& console);
int cmd_demo_bias(const RunConfig& config, const ExecPolicy& exec, std::ostream& console);
int cmd_validate(const RunConfig& config, const ExecPolicy& exec, std::ostream& console);

int execute(const RunConfig& config, const ExecPolicy& exec, std::ostream& console);

}  // namespace rarebayes
