#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "rarebayes/config.hpp"
#include "rarebayes/errors.hpp"
#include "rarebayes/io.hpp"
#include "rarebayes/run.hpp"

namespace {

rarebayes::RunMode mode_of(const std::string& name) {
  if (name == "update") return rarebayes::RunMode::kUpdate;
  if (name == "compare") return rarebayes::RunMode::kCompare;
  if (name == "demo-bias") return rarebayes::RunMode::kDemoBias;
  return rarebayes::RunMode::kValidate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian model updating and model class selection by subset simulation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"update", "sample the posterior and estimate the model evidence"},
      {"compare", "run several model classes and report Bayes factors"},
      {"demo-bias", "original-formulation demonstrator with user-chosen c"},
      {"validate", "cross-check a run against direct Monte Carlo and rejection sampling"},
  };
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--threads", threads, "worker threads (overrides RAREBAYES_THREADS)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rarebayes::kExitOk : rarebayes::kExitConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();

  try {
    rarebayes::RunConfig config = rarebayes::load_config(config_path);
    if (config.mode != mode_of(command))
      throw rarebayes::ConfigError("config declares mode '" + to_string(config.mode) +
                                   "' but the command is '" + command + "'");
    if (seed) {
      config.seed = *seed;
      config.sus.seed = *seed;
    }
    if (out_dir) config.out_dir = *out_dir;

    rarebayes::ExecPolicy exec;
    exec.threads = rarebayes::resolve_threads(threads);

    return rarebayes::execute(config, exec, std::cout);
  } catch (const rarebayes::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rarebayes::kExitConfigError;
  } catch (const rarebayes::PlateauError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rarebayes::kExitPlateau;
  } catch (const rarebayes::StoppingExhaustedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "thresholds reached:";
    for (double b : e.thresholds()) std::cerr << " " << rarebayes::format_double(b);
    std::cerr << "\n" << "a sequence:";
    for (double a : e.a_sequence()) std::cerr << " " << rarebayes::format_double(a);
    std::cerr << "\n";
    return rarebayes::kExitStoppingExhausted;
  } catch (const rarebayes::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rarebayes::kExitModelFault;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rarebayes::kExitFailure;
  }
}
