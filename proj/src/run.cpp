#include "rarebayes/run.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "rarebayes/errors.hpp"
#include "rarebayes/io.hpp"
#include "rarebayes/oracles.hpp"
#include "rarebayes/rng.hpp"
#include "rarebayes/stats.hpp"

namespace rarebayes {
namespace {

BusResult run_one_model(const RunConfig& config, const ModelConfig& mc,
                        std::uint64_t master_seed, const ExecPolicy& exec) {
  auto model = build_model(mc);
  SusConfig sus = config.sus;
  sus.seed = master_seed;
  return run_bus(*model, mc.prior, sus, config.proposal, config.stopping, exec);
}

void write_bus_artifacts(const std::string& dir, const BusResult& result) {
  ensure_directory(dir);
  atomic_write_file(dir + "/levels.csv", levels_csv(result.levels));
  atomic_write_file(dir + "/ccdf.csv", ccdf_csv(result.ccdf));
  atomic_write_file(dir + "/posterior.csv", posterior_csv(result.posterior));
  atomic_write_file(dir + "/evidence.json",
                    evidence_json_text(result.evidence, result.a_sequence, result.tol));
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.at(j));
  return out;
}

// Largest per-component KS distance between two sample sets.
struct KsReport {
  std::vector<double> per_component;
  double max = 0.0;
  double critical = 0.0;
  bool pass = false;
};

KsReport ks_against(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b, double alpha) {
  KsReport rep;
  const std::size_t dim = a.empty() ? 0 : a.front().size();
  rep.critical = ks_critical_two_sample(alpha, a.size(), b.size());
  for (std::size_t j = 0; j < dim; ++j) {
    const double d = ks_two_sample(column(a, j), column(b, j));
    rep.per_component.push_back(d);
    rep.max = std::max(rep.max, d);
  }
  rep.pass = rep.max < rep.critical;
  return rep;
}

}  // namespace

std::unique_ptr<LogLikelihoodModel> build_model(const ModelConfig& model) {
  if (model.name == "gaussian_conjugate")
    return std::make_unique<GaussianConjugateModel>(model.data, model.noise_std);
  if (model.name == "shear_identifiable" || model.name == "shear_unidentifiable")
    return std::make_unique<ShearFrameModel>(model.shear);
  throw ConfigError("unknown model '" + model.name + "'");
}

int resolve_threads(const std::optional<int>& requested) {
  if (requested) {
    if (*requested < 1) throw ConfigError("threads must be at least 1");
    return *requested;
  }
  if (const char* env = std::getenv("RAREBAYES_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigError(std::string("RAREBAYES_THREADS must be a positive integer, got '") +
                        env + "'");
    return static_cast<int>(v);
  }
  return 1;
}

std::uint64_t compare_model_seed(const RunConfig& config, std::size_t index) {
  const ModelConfig& m = config.models.at(index);
  if (m.seed) return *m.seed;
  return mix_key(config.seed, rngdomain::kCompare, index, 0);
}

std::string evolution_table(const BusResult& result) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%5s  %12s  %12s  %12s\n", "level", "b_k", "c_k", "a_k");
  out << line;
  for (const auto& lv : result.levels) {
    char bcol[32], ccol[32], acol[32];
    std::snprintf(bcol, sizeof bcol, "%.3e", lv.threshold);
    std::snprintf(ccol, sizeof ccol, "%.3e", std::exp(-lv.threshold));
    acol[0] = '\0';
    if (lv.level >= 1 && static_cast<std::size_t>(lv.level) <= result.a_sequence.size())
      std::snprintf(acol, sizeof acol, "%.4e", result.a_sequence[lv.level - 1]);
    std::snprintf(line, sizeof line, "%5d  %12s  %12s  %12s\n", lv.level, bcol, ccol, acol);
    out << line;
  }
  return out.str();
}

int cmd_update(const RunConfig& config, const ExecPolicy& exec, std::ostream& console) {
  const ModelConfig& mc = config.models.front();
  const BusResult result = run_one_model(config, mc, config.seed, exec);
  write_bus_artifacts(config.out_dir, result);

  console << evolution_table(result);
  console << "ln evidence = " << result.evidence.ln_evidence << "  (cov proxy "
          << result.evidence.cov_proxy << ")\n";
  console << "stopped at level " << result.evidence.stopping_level << " with a_m = "
          << result.posterior.a_m << " <= tol " << result.tol << "\n";
  console << result.posterior.theta.size() << " posterior samples at b_m = "
          << result.posterior.b_m << "\n";
  console << "artifacts written to " << config.out_dir << "\n";
  return kExitOk;
}

int cmd_compare(const RunConfig& config, const ExecPolicy& exec, std::ostream& console) {
  struct Entry {
    const ModelConfig* mc = nullptr;
    std::uint64_t seed = 0;
    BusResult result;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    Entry e;
    e.mc = &config.models[i];
    e.seed = compare_model_seed(config, i);
    e.result = run_one_model(config, *e.mc, e.seed, exec);
    write_bus_artifacts(config.out_dir + "/" + e.mc->label, e.result);
    console << e.mc->label << ": ln evidence = " << e.result.evidence.ln_evidence
            << "  (cov proxy " << e.result.evidence.cov_proxy << ", stopped at level "
            << e.result.evidence.stopping_level << ")\n";
    entries.push_back(std::move(e));
  }

  nlohmann::json j;
  j["models"] = nlohmann::json::array();
  for (const auto& e : entries) {
    j["models"].push_back({{"label", e.mc->label},
                           {"name", e.mc->name},
                           {"seed", e.seed},
                           {"ln_evidence", e.result.evidence.ln_evidence},
                           {"cov_proxy", e.result.evidence.cov_proxy},
                           {"stopping_level", e.result.evidence.stopping_level},
                           {"b_m", e.result.evidence.b_m}});
  }
  j["bayes_factors"] = nlohmann::json::array();
  for (std::size_t a = 0; a < entries.size(); ++a) {
    for (std::size_t b = a + 1; b < entries.size(); ++b) {
      const double ln_ratio =
          entries[a].result.evidence.ln_evidence - entries[b].result.evidence.ln_evidence;
      const double std_ln_ratio = std::sqrt(
          entries[a].result.evidence.cov_proxy * entries[a].result.evidence.cov_proxy +
          entries[b].result.evidence.cov_proxy * entries[b].result.evidence.cov_proxy);
      j["bayes_factors"].push_back({{"numerator", entries[a].mc->label},
                                    {"denominator", entries[b].mc->label},
                                    {"ln_ratio", ln_ratio},
                                    {"ratio", std::exp(ln_ratio)},
                                    {"std_ln_ratio", std_ln_ratio}});
      console << "ln R(" << entries[a].mc->label << "/" << entries[b].mc->label
              << ") = " << ln_ratio << " +- " << std_ln_ratio << "\n";
    }
  }
  ensure_directory(config.out_dir);
  atomic_write_file(config.out_dir + "/compare.json", j.dump(2) + "\n");
  console << "artifacts written to " << config.out_dir << "\n";
  return kExitOk;
}

int cmd_demo_bias(const RunConfig& config, const ExecPolicy& exec, std::ostream& console) {
  const ModelConfig& mc = config.models.front();
  auto model = build_model(mc);

  const auto lmax = model->log_max_likelihood();
  if (!lmax)
    throw Error("demo-bias: model exposes no maximum likelihood, c_max is unknown");
  const double c_max = std::exp(-*lmax);
  console << "c_max = 1 / max L = " << c_max << "\n";

  ensure_directory(config.out_dir);
  RngFactory rng(config.seed);

  auto oracle_rng = rng.stream(rngdomain::kOracle, 0);
  const RejectionSample oracle = rejection_sample(*model, mc.prior, c_max,
                                                  config.demo_bias.oracle_count, oracle_rng);
  PosteriorSampleSet oracle_set;
  oracle_set.theta = oracle.theta;
  atomic_write_file(config.out_dir + "/oracle_posterior.csv", posterior_csv(oracle_set));
  console << "rejection oracle: " << oracle.theta.size() << " samples, acceptance rate "
          << oracle.acceptance_rate << "\n";

  nlohmann::json j;
  j["c_max"] = c_max;
  j["oracle_count"] = oracle.theta.size();
  j["runs"] = nlohmann::json::array();

  for (std::size_t k = 0; k < config.demo_bias.multipliers.size(); ++k) {
    const double mult = config.demo_bias.multipliers[k];
    const double c = config.demo_bias.relative_to_cmax ? mult * c_max : mult;

    SusConfig sus = config.sus;
    sus.seed = mix_key(config.seed, rngdomain::kRun, k + 1, 0);
    const OriginalBusResult r =
        run_bus_original(*model, mc.prior, c, sus, config.proposal, exec);

    const std::string posterior_file = "posterior_c" + std::to_string(k + 1) + ".csv";
    atomic_write_file(config.out_dir + "/" + posterior_file, posterior_csv(r.posterior));

    const KsReport ks = ks_against(r.posterior.theta, oracle.theta, 0.01);
    j["runs"].push_back({{"index", k + 1},
                         {"multiplier", mult},
                         {"c", c},
                         {"c_over_cmax", c / c_max},
                         {"ln_evidence", r.ln_evidence},
                         {"cov_proxy", r.cov_proxy},
                         {"p_y_positive", r.p_y_positive},
                         {"final_level", r.final_level},
                         {"posterior_count", r.posterior.theta.size()},
                         {"posterior_file", posterior_file},
                         {"ks_per_component", ks.per_component},
                         {"ks_max", ks.max},
                         {"ks_critical", ks.critical},
                         {"ks_pass", ks.pass}});
    console << "c = " << c << " (" << c / c_max << " c_max): ln evidence = "
            << r.ln_evidence << ", KS = " << ks.max << " vs critical " << ks.critical
            << (ks.pass ? "  (matches oracle)" : "  (biased posterior)") << "\n";
  }
  atomic_write_file(config.out_dir + "/demo_bias.json", j.dump(2) + "\n");
  console << "artifacts written to " << config.out_dir << "\n";
  return kExitOk;
}

int cmd_validate(const RunConfig& config, const ExecPolicy& exec, std::ostream& console) {
  const ModelConfig& mc = config.models.front();
  auto model = build_model(mc);

  const BusResult bus = run_one_model(config, mc, config.seed, exec);
  write_bus_artifacts(config.out_dir, bus);

  RngFactory rng(config.seed);
  nlohmann::json checks = nlohmann::json::array();
  bool all_pass = true;

  auto record = [&](const std::string& name, bool pass, nlohmann::json detail) {
    detail["name"] = name;
    detail["pass"] = pass;
    checks.push_back(detail);
    all_pass = all_pass && pass;
    console << (pass ? "[ ok ] " : "[FAIL] ") << name << "\n";
  };

  {
    auto mc_rng = rng.stream(rngdomain::kOracle, 1);
    const DirectMcEvidence direct =
        direct_mc_evidence(*model, mc.prior, config.validate_opts.mc_count, mc_rng);
    const bool have = direct.p_d > 0.0 && std::isfinite(direct.cov);
    const double diff = have ? std::abs(bus.evidence.ln_evidence - std::log(direct.p_d))
                             : std::numeric_limits<double>::infinity();
    const double limit =
        4.0 * std::sqrt(bus.evidence.cov_proxy * bus.evidence.cov_proxy +
                        direct.cov * direct.cov);
    record("evidence_vs_direct_mc", have && diff <= limit,
           {{"ln_evidence", bus.evidence.ln_evidence},
            {"direct_mc_p_d", direct.p_d},
            {"direct_mc_cov", direct.cov},
            {"abs_diff", diff},
            {"limit", limit}});
  }

  const auto* gaussian = dynamic_cast<const GaussianConjugateModel*>(model.get());
  bool standard_prior = true;
  for (const auto& m : mc.prior.marginals)
    standard_prior = standard_prior && m.kind == MarginalKind::kStandardNormal;

  if (gaussian && standard_prior) {
    const double exact = gaussian->analytic_log_evidence();
    const double diff = std::abs(bus.evidence.ln_evidence - exact);
    const double limit = 4.0 * bus.evidence.cov_proxy;
    record("evidence_vs_analytic", diff <= limit,
           {{"ln_evidence", bus.evidence.ln_evidence},
            {"analytic", exact},
            {"abs_diff", diff},
            {"limit", limit}});
  }

  const auto lmax = model->log_max_likelihood();
  if (lmax) {
    auto rej_rng = rng.stream(rngdomain::kOracle, 2);
    const RejectionSample oracle = rejection_sample(
        *model, mc.prior, std::exp(-*lmax), config.validate_opts.oracle_count, rej_rng);

    const KsReport ks = ks_against(bus.posterior.theta, oracle.theta, 0.01);
    record("posterior_ks_vs_rejection", ks.pass,
           {{"ks_per_component", ks.per_component},
            {"ks_max", ks.max},
            {"ks_critical", ks.critical},
            {"oracle_count", oracle.theta.size()}});

    const std::size_t dim = model->dim();
    const std::size_t chains = config.sus.seeds_per_level();
    bool means_ok = true;
    nlohmann::json mean_detail = nlohmann::json::array();
    for (std::size_t jcol = 0; jcol < dim; ++jcol) {
      const MomentSummary mb = summarize(column(bus.posterior.theta, jcol));
      const MomentSummary mo = summarize(column(oracle.theta, jcol));
      const double se_b = std::sqrt(mb.variance / static_cast<double>(chains));
      const double diff = std::abs(mb.mean - mo.mean);
      const double limit =
          4.0 * std::sqrt(se_b * se_b + mo.std_error() * mo.std_error());
      const bool ok = diff <= limit;
      means_ok = means_ok && ok;
      mean_detail.push_back({{"component", jcol + 1},
                             {"posterior_mean", mb.mean},
                             {"oracle_mean", mo.mean},
                             {"abs_diff", diff},
                             {"limit", limit},
                             {"pass", ok}});
    }
    record("posterior_mean_vs_rejection", means_ok, {{"components", mean_detail}});

    if (gaussian && standard_prior) {
      const auto exact_mean = gaussian->posterior_mean();
      bool ok = true;
      nlohmann::json detail = nlohmann::json::array();
      for (std::size_t jcol = 0; jcol < dim; ++jcol) {
        const MomentSummary mb = summarize(column(bus.posterior.theta, jcol));
        const double se_b = std::sqrt(mb.variance / static_cast<double>(chains));
        const double diff = std::abs(mb.mean - exact_mean[jcol]);
        const double limit = 4.0 * se_b;
        ok = ok && diff <= limit;
        detail.push_back({{"component", jcol + 1},
                          {"posterior_mean", mb.mean},
                          {"analytic_mean", exact_mean[jcol]},
                          {"abs_diff", diff},
                          {"limit", limit}});
      }
      record("posterior_mean_vs_analytic", ok, {{"components", detail}});
    }
  }

  nlohmann::json j;
  j["pass"] = all_pass;
  j["checks"] = checks;
  atomic_write_file(config.out_dir + "/validation.json", j.dump(2) + "\n");
  console << (all_pass ? "all checks passed" : "validation FAILED") << "\n";
  console << "artifacts written to " << config.out_dir << "\n";
  return all_pass ? kExitOk : kExitFailure;
}

int execute(const RunConfig& config, const ExecPolicy& exec, std::ostream& console) {
  switch (config.mode) {
    case RunMode::kUpdate: return cmd_update(config, exec, console);
    case RunMode::kCompare: return cmd_compare(config, exec, console);
    case RunMode::kDemoBias: return cmd_demo_bias(config, exec, console);
    case RunMode::kValidate: return cmd_validate(config, exec, console);
  }
  throw Error("unreachable mode");
}

}  // namespace rarebayes
