#include "rarebayes/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rarebayes/errors.hpp"

namespace rarebayes {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error("cannot create directory '" + path + "': " + ec.message());
}

std::string levels_csv(const std::vector<LevelRecord>& levels) {
  std::ostringstream out;
  out << "level,b_i,c_i,seed_count,acceptance_rate,gamma_i,delta_i\n";
  for (const auto& lv : levels) {
    const std::size_t seeds = lv.level == 0 ? 0 : lv.chain_count();
    out << lv.level << "," << format_double(lv.threshold) << ","
        << format_double(std::exp(-lv.threshold)) << "," << seeds << ","
        << format_double(lv.stats.acceptance_rate()) << ","
        << format_double(lv.gamma) << "," << format_double(lv.delta) << "\n";
  }
  return out.str();
}

std::string ccdf_csv(const CcdfCurve& curve) {
  std::ostringstream out;
  out << "b,ln_ccdf,v\n";
  for (const auto& pt : curve.points)
    out << format_double(pt.b) << "," << format_double(pt.ln_p) << ","
        << format_double(pt.v) << "\n";
  return out.str();
}

std::string posterior_csv(const PosteriorSampleSet& samples) {
  std::ostringstream out;
  const std::size_t dim = samples.theta.empty() ? 0 : samples.theta.front().size();
  for (std::size_t j = 0; j < dim; ++j) out << (j ? "," : "") << "theta" << j + 1;
  out << "\n";
  for (const auto& row : samples.theta) {
    for (std::size_t j = 0; j < row.size(); ++j)
      out << (j ? "," : "") << format_double(row[j]);
    out << "\n";
  }
  return out.str();
}

std::string evidence_json_text(const EvidenceEstimate& evidence,
                               const std::vector<double>& a_sequence, double tol) {
  nlohmann::json j;
  j["ln_evidence"] = evidence.ln_evidence;
  j["cov_proxy"] = evidence.cov_proxy;
  j["stopping_level"] = evidence.stopping_level;
  j["b_m"] = evidence.b_m;
  j["a_sequence"] = a_sequence;
  j["tol"] = tol;
  return j.dump(2) + "\n";
}

}  // namespace rarebayes
