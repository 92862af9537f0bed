#include "rarebayes/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rarebayes/errors.hpp"

namespace rarebayes {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& value, const std::string& key, int line) {
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError(key + ": empty value", line);
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError(key + ": expected a number, got '" + v + "'", line);
  return x;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key, int line) {
  const std::string v = trim(value);
  if (v.empty() || v[0] == '-' || v[0] == '+')
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'", line);
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'", line);
  return static_cast<std::uint64_t>(x);
}

std::size_t parse_size(const std::string& value, const std::string& key, int line) {
  return static_cast<std::size_t>(parse_u64(value, key, line));
}

bool parse_bool(const std::string& value, const std::string& key, int line) {
  const std::string v = trim(value);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'", line);
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key,
                                      int line) {
  std::vector<double> out;
  for (const auto& tok : tokenize(value)) out.push_back(parse_double(tok, key, line));
  if (out.empty()) throw ConfigError(key + ": expected at least one number", line);
  return out;
}

// "kind k=v k=v" with an exact required key set per kind.
MarginalSpec parse_marginal(const std::string& value, int line) {
  const auto toks = tokenize(value);
  if (toks.empty()) throw ConfigError("marginal: missing distribution kind", line);
  const std::string& kind = toks[0];

  std::map<std::string, double> args;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("marginal: expected key=value, got '" + toks[i] + "'", line);
    const std::string k = toks[i].substr(0, eq);
    if (args.count(k))
      throw ConfigError("marginal: duplicate parameter '" + k + "'", line);
    args[k] = parse_double(toks[i].substr(eq + 1), "marginal " + k, line);
  }

  auto need = [&](const std::string& k) {
    auto it = args.find(k);
    if (it == args.end())
      throw ConfigError("marginal " + kind + ": missing parameter '" + k + "'", line);
    return it->second;
  };
  auto reject_extras = [&](const std::set<std::string>& allowed) {
    for (const auto& [k, v] : args) {
      (void)v;
      if (!allowed.count(k))
        throw ConfigError("marginal " + kind + ": unknown parameter '" + k + "'", line);
    }
  };

  try {
    if (kind == "standard-normal") {
      reject_extras({});
      return MarginalSpec::standard_normal();
    }
    if (kind == "normal") {
      reject_extras({"mean", "std"});
      return MarginalSpec::normal(need("mean"), need("std"));
    }
    if (kind == "lognormal") {
      const bool direct = args.count("mu") || args.count("sigma");
      const bool shaped = args.count("mode") || args.count("std");
      if (direct && shaped)
        throw ConfigError("marginal lognormal: give either mu/sigma or mode/std, not both",
                          line);
      if (shaped) {
        reject_extras({"mode", "std"});
        return lognormal_from_mode_std(need("mode"), need("std"));
      }
      reject_extras({"mu", "sigma"});
      return MarginalSpec::lognormal(need("mu"), need("sigma"));
    }
    if (kind == "uniform") {
      reject_extras({"lower", "upper"});
      return MarginalSpec::uniform(need("lower"), need("upper"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("marginal ") + kind + ": " + e.what(), line);
  }
  throw ConfigError("marginal: unknown kind '" + kind + "'", line);
}

std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Section {
  std::string name;   // empty for top level
  std::string label;
  int header_line = 0;
  std::set<std::string> seen;
};

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kUpdate: return "update";
    case RunMode::kCompare: return "compare";
    case RunMode::kDemoBias: return "demo-bias";
    case RunMode::kValidate: return "validate";
  }
  return "?";
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool saw_mode = false;

  std::vector<ModelConfig> models;
  std::vector<int> model_lines;
  struct PriorBlock {
    std::string label;
    PriorSpec prior;
    int header_line = 0;
  };
  std::vector<PriorBlock> priors;

  Section sec;  // current section; name empty = top level

  auto mark_seen = [&](const std::string& key, int line) {
    if (key != "marginal" && !sec.seen.insert(key).second)
      throw ConfigError("duplicate key '" + key + "'", line);
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header '" + line + "'", line_no);
      const auto inner = tokenize(line.substr(1, line.size() - 2));
      if (inner.empty() || inner.size() > 2)
        throw ConfigError("malformed section header '" + line + "'", line_no);
      sec = Section{inner[0], inner.size() == 2 ? inner[1] : "", line_no, {}};

      static const std::set<std::string> known = {
          "model", "prior", "sus", "proposal", "stopping", "demo_bias", "validate"};
      if (!known.count(sec.name))
        throw ConfigError("unknown section '" + sec.name + "'", line_no);
      if (!sec.label.empty() && sec.name != "model" && sec.name != "prior")
        throw ConfigError("section '" + sec.name + "' does not take a label", line_no);

      if (sec.name == "model") {
        for (const auto& m : models)
          if (m.label == sec.label)
            throw ConfigError(sec.label.empty()
                                  ? "duplicate unlabeled [model] section"
                                  : "duplicate model label '" + sec.label + "'",
                              line_no);
        ModelConfig m;
        m.label = sec.label;
        models.push_back(std::move(m));
        model_lines.push_back(line_no);
      } else if (sec.name == "prior") {
        for (const auto& p : priors)
          if (p.label == sec.label)
            throw ConfigError(sec.label.empty()
                                  ? "duplicate unlabeled [prior] section"
                                  : "duplicate prior label '" + sec.label + "'",
                              line_no);
        priors.push_back({sec.label, {}, line_no});
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value, got '" + line + "'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    if (value.empty()) throw ConfigError(key + ": empty value", line_no);
    mark_seen(key, line_no);

    if (sec.name.empty()) {
      if (key == "mode") {
        if (value == "update") cfg.mode = RunMode::kUpdate;
        else if (value == "compare") cfg.mode = RunMode::kCompare;
        else if (value == "demo-bias") cfg.mode = RunMode::kDemoBias;
        else if (value == "validate") cfg.mode = RunMode::kValidate;
        else throw ConfigError("mode: unknown mode '" + value + "'", line_no);
        saw_mode = true;
      } else if (key == "seed") {
        cfg.seed = parse_u64(value, key, line_no);
      } else if (key == "out") {
        cfg.out_dir = value;
      } else {
        throw ConfigError("unknown top-level key '" + key + "'", line_no);
      }
    } else if (sec.name == "model") {
      ModelConfig& m = models.back();
      if (key == "name") {
        if (value != "gaussian_conjugate" && value != "shear_identifiable" &&
            value != "shear_unidentifiable")
          throw ConfigError("name: unknown model '" + value + "'", line_no);
        m.name = value;
        m.shear.scale_masses = (value == "shear_unidentifiable");
      } else if (key == "seed") {
        m.seed = parse_u64(value, key, line_no);
      } else if (key == "data") {
        m.data = parse_double_list(value, key, line_no);
      } else if (key == "noise_std") {
        m.noise_std = parse_double(value, key, line_no);
      } else if (key == "epsilon") {
        m.shear.epsilon = parse_double(value, key, line_no);
      } else if (key == "lambda1") {
        m.shear.lambda1 = parse_double(value, key, line_no);
      } else if (key == "lambda2") {
        m.shear.lambda2 = parse_double(value, key, line_no);
      } else if (key == "include_normalization") {
        m.shear.include_normalization = parse_bool(value, key, line_no);
      } else if (key == "mass1") {
        m.shear.mass1 = parse_double(value, key, line_no);
      } else if (key == "mass2") {
        m.shear.mass2 = parse_double(value, key, line_no);
      } else if (key == "stiffness1") {
        m.shear.stiffness1 = parse_double(value, key, line_no);
      } else if (key == "stiffness2") {
        m.shear.stiffness2 = parse_double(value, key, line_no);
      } else if (key == "measured_f1") {
        m.shear.measured_f1 = parse_double(value, key, line_no);
      } else if (key == "measured_f2") {
        m.shear.measured_f2 = parse_double(value, key, line_no);
      } else {
        throw ConfigError("unknown model key '" + key + "'", line_no);
      }
    } else if (sec.name == "prior") {
      if (key != "marginal")
        throw ConfigError("unknown prior key '" + key + "'", line_no);
      priors.back().prior.marginals.push_back(parse_marginal(value, line_no));
    } else if (sec.name == "sus") {
      if (key == "p0") cfg.sus.p0 = parse_double(value, key, line_no);
      else if (key == "n") cfg.sus.n = parse_size(value, key, line_no);
      else if (key == "max_levels") cfg.sus.max_levels = parse_size(value, key, line_no);
      else throw ConfigError("unknown sus key '" + key + "'", line_no);
    } else if (sec.name == "proposal") {
      if (key == "width") cfg.proposal.width = parse_double(value, key, line_no);
      else throw ConfigError("unknown proposal key '" + key + "'", line_no);
    } else if (sec.name == "stopping") {
      if (key == "tol") cfg.stopping.tol = parse_double(value, key, line_no);
      else if (key == "inner_p0") cfg.stopping.inner_p0 = parse_double(value, key, line_no);
      else if (key == "inner_n") cfg.stopping.inner_n = parse_size(value, key, line_no);
      else if (key == "inner_max_levels")
        cfg.stopping.inner_max_levels = parse_size(value, key, line_no);
      else if (key == "inner_width")
        cfg.stopping.inner_width = parse_double(value, key, line_no);
      else throw ConfigError("unknown stopping key '" + key + "'", line_no);
    } else if (sec.name == "demo_bias") {
      if (key == "multipliers")
        cfg.demo_bias.multipliers = parse_double_list(value, key, line_no);
      else if (key == "relative_to_cmax")
        cfg.demo_bias.relative_to_cmax = parse_bool(value, key, line_no);
      else if (key == "oracle_count")
        cfg.demo_bias.oracle_count = parse_size(value, key, line_no);
      else throw ConfigError("unknown demo_bias key '" + key + "'", line_no);
    } else if (sec.name == "validate") {
      if (key == "oracle_count")
        cfg.validate_opts.oracle_count = parse_size(value, key, line_no);
      else if (key == "mc_count")
        cfg.validate_opts.mc_count = parse_size(value, key, line_no);
      else throw ConfigError("unknown validate key '" + key + "'", line_no);
    }
  }

  if (!saw_mode) throw ConfigError("missing required key 'mode'");
  if (models.empty()) throw ConfigError("missing [model] section");

  for (std::size_t i = 0; i < models.size(); ++i) {
    ModelConfig& m = models[i];
    const int at = model_lines[i];
    const std::string who =
        m.label.empty() ? std::string("[model]") : "[model " + m.label + "]";
    if (m.name.empty()) throw ConfigError(who + ": missing key 'name'", at);
    if (m.name == "gaussian_conjugate") {
      if (m.data.empty()) throw ConfigError(who + ": gaussian_conjugate model needs 'data'", at);
    } else if (!m.data.empty()) {
      throw ConfigError(who + ": 'data' only applies to the gaussian_conjugate model", at);
    }

    bool found = false;
    for (const auto& p : priors) {
      if (p.label == m.label) {
        m.prior = p.prior;
        found = true;
        break;
      }
    }
    if (!found)
      throw ConfigError(who + ": no matching " +
                            (m.label.empty() ? std::string("[prior]")
                                             : "[prior " + m.label + "]") +
                            " section",
                        at);
  }
  for (const auto& p : priors) {
    bool used = false;
    for (const auto& m : models) used = used || m.label == p.label;
    if (!used)
      throw ConfigError((p.label.empty() ? std::string("[prior]")
                                         : "[prior " + p.label + "]") +
                            ": no matching model section",
                        p.header_line);
  }

  cfg.models = std::move(models);
  cfg.sus.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void RunConfig::validate() const {
  try {
    sus.validate();
    proposal.validate();
    stopping.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  if (mode == RunMode::kCompare) {
    if (models.size() < 2)
      throw ConfigError("compare mode needs at least two [model LABEL] sections");
    for (const auto& m : models)
      if (m.label.empty())
        throw ConfigError("compare mode: every model section needs a label");
  } else {
    if (models.size() != 1)
      throw ConfigError(to_string(mode) + " mode takes exactly one model, got " +
                        std::to_string(models.size()));
  }

  for (const auto& m : models) {
    const std::string who =
        m.label.empty() ? std::string("model") : "model " + m.label;
    // labels become artifact subdirectory names
    for (char c : m.label)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
        throw ConfigError(who + ": label may only contain letters, digits, '_', '-', '.'");
    if (m.prior.marginals.empty())
      throw ConfigError(who + ": prior has no marginals");
    std::size_t dim = 0;
    if (m.name == "gaussian_conjugate") {
      dim = m.data.size();
      if (!(m.noise_std > 0.0) || !std::isfinite(m.noise_std))
        throw ConfigError(who + ": noise_std must be positive");
    } else {
      dim = m.shear.scale_masses ? 4 : 2;
      try {
        m.shear.validate();
      } catch (const std::exception& e) {
        throw ConfigError(who + ": " + e.what());
      }
    }
    if (m.prior.dim() != dim)
      throw ConfigError(who + ": prior has " + std::to_string(m.prior.dim()) +
                        " marginals but the model has " + std::to_string(dim) +
                        " parameters");
  }

  if (mode == RunMode::kDemoBias) {
    if (demo_bias.multipliers.empty())
      throw ConfigError("demo_bias: multipliers must be non-empty");
    for (double c : demo_bias.multipliers)
      if (!(c > 0.0) || !std::isfinite(c))
        throw ConfigError("demo_bias: multipliers must be positive and finite");
    if (demo_bias.oracle_count == 0)
      throw ConfigError("demo_bias: oracle_count must be positive");
  }
  if (mode == RunMode::kValidate) {
    if (validate_opts.oracle_count == 0 || validate_opts.mc_count == 0)
      throw ConfigError("validate: oracle_count and mc_count must be positive");
  }
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  out << "mode = " << to_string(config.mode) << "\n";
  out << "seed = " << config.seed << "\n";
  out << "out = " << config.out_dir << "\n";

  out << "\n[sus]\n";
  out << "p0 = " << format_g17(config.sus.p0) << "\n";
  out << "n = " << config.sus.n << "\n";
  out << "max_levels = " << config.sus.max_levels << "\n";

  out << "\n[proposal]\n";
  out << "width = " << format_g17(config.proposal.width) << "\n";

  out << "\n[stopping]\n";
  out << "tol = " << format_g17(config.stopping.tol) << "\n";
  out << "inner_p0 = " << format_g17(config.stopping.inner_p0) << "\n";
  out << "inner_n = " << config.stopping.inner_n << "\n";
  out << "inner_max_levels = " << config.stopping.inner_max_levels << "\n";
  out << "inner_width = " << format_g17(config.stopping.inner_width) << "\n";

  if (config.mode == RunMode::kDemoBias) {
    out << "\n[demo_bias]\n";
    out << "multipliers =";
    for (double c : config.demo_bias.multipliers) out << " " << format_g17(c);
    out << "\n";
    out << "relative_to_cmax = " << (config.demo_bias.relative_to_cmax ? "true" : "false")
        << "\n";
    out << "oracle_count = " << config.demo_bias.oracle_count << "\n";
  }
  if (config.mode == RunMode::kValidate) {
    out << "\n[validate]\n";
    out << "oracle_count = " << config.validate_opts.oracle_count << "\n";
    out << "mc_count = " << config.validate_opts.mc_count << "\n";
  }

  for (const auto& m : config.models) {
    out << "\n[model" << (m.label.empty() ? "" : " " + m.label) << "]\n";
    out << "name = " << m.name << "\n";
    if (m.seed) out << "seed = " << *m.seed << "\n";
    if (m.name == "gaussian_conjugate") {
      out << "data =";
      for (double d : m.data) out << " " << format_g17(d);
      out << "\n";
      out << "noise_std = " << format_g17(m.noise_std) << "\n";
    } else {
      const ShearFrameSpec& s = m.shear;
      out << "epsilon = " << format_g17(s.epsilon) << "\n";
      out << "lambda1 = " << format_g17(s.lambda1) << "\n";
      out << "lambda2 = " << format_g17(s.lambda2) << "\n";
      out << "include_normalization = " << (s.include_normalization ? "true" : "false")
          << "\n";
      out << "mass1 = " << format_g17(s.mass1) << "\n";
      out << "mass2 = " << format_g17(s.mass2) << "\n";
      out << "stiffness1 = " << format_g17(s.stiffness1) << "\n";
      out << "stiffness2 = " << format_g17(s.stiffness2) << "\n";
      out << "measured_f1 = " << format_g17(s.measured_f1) << "\n";
      out << "measured_f2 = " << format_g17(s.measured_f2) << "\n";
    }

    out << "\n[prior" << (m.label.empty() ? "" : " " + m.label) << "]\n";
    for (const auto& marg : m.prior.marginals) {
      out << "marginal = " << to_string(marg.kind);
      switch (marg.kind) {
        case MarginalKind::kStandardNormal:
          break;
        case MarginalKind::kNormal:
          out << " mean=" << format_g17(marg.a) << " std=" << format_g17(marg.b);
          break;
        case MarginalKind::kLognormal:
          out << " mu=" << format_g17(marg.a) << " sigma=" << format_g17(marg.b);
          break;
        case MarginalKind::kUniform:
          out << " lower=" << format_g17(marg.a) << " upper=" << format_g17(marg.b);
          break;
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace rarebayes
