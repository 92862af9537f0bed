#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rarebayes {

// Exit codes used by the CLI; library code throws, the CLI maps.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfigError = 2,
  kExitPlateau = 3,
  kExitStoppingExhausted = 4,
  kExitModelFault = 5,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Config file rejected; line is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "config line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Threshold selection degenerated: fewer than p0*N values strictly above
// the would-be threshold. Signals a mis-specified driving variable.
class PlateauError : public Error {
 public:
  PlateauError(const std::string& where, int level)
      : Error(where + ": threshold plateau at level " + std::to_string(level) +
              " (ties at the level quantile; driving variable is degenerate)"),
        level_(level) {}
  int level() const { return level_; }

 private:
  int level_;
};

// Level budget ran out before the stopping rule fired. Carries the partial
// run: thresholds reached and inadmissibility estimates accumulated so far.
class StoppingExhaustedError : public Error {
 public:
  StoppingExhaustedError(std::size_t max_levels, std::vector<double> a_sequence,
                         std::vector<double> thresholds)
      : Error("stopping rule not reached within " + std::to_string(max_levels) +
              " levels (last a = " +
              (a_sequence.empty() ? std::string("none")
                                  : std::to_string(a_sequence.back())) +
              ")"),
        a_sequence_(std::move(a_sequence)),
        thresholds_(std::move(thresholds)) {}
  const std::vector<double>& a_sequence() const { return a_sequence_; }
  const std::vector<double>& thresholds() const { return thresholds_; }

 private:
  std::vector<double> a_sequence_;
  std::vector<double> thresholds_;
};

// A model evaluation returned NaN/+inf or threw.
class ModelError : public Error {
 public:
  explicit ModelError(const std::string& msg) : Error(msg) {}
};

}  // namespace rarebayes
