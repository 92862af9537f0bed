#pragma once

#include <string>
#include <vector>

#include "rarebayes/bus.hpp"
#include "rarebayes/sus.hpp"

namespace rarebayes {

// Shortest round-trippable decimal (%.17g); prints inf/-inf/nan literally.
std::string format_double(double x);

// Writes content to a temp file in the same directory, then renames over
// path so readers never observe a partial artifact.
void atomic_write_file(const std::string& path, const std::string& content);

void ensure_directory(const std::string& path);

// level,b_i,c_i,seed_count,acceptance_rate,gamma_i,delta_i
// Level 0 is the direct Monte Carlo stage: b_0 = -inf, no seeds, no
// acceptance rate. gamma_i/delta_i are nan on the final level because the
// transition out of it never happened.
std::string levels_csv(const std::vector<LevelRecord>& levels);

// b,ln_ccdf,v with v = b + ln_ccdf.
std::string ccdf_csv(const CcdfCurve& curve);

// theta1..thetaD, one posterior sample per row.
std::string posterior_csv(const PosteriorSampleSet& samples);

// ln_evidence, cov_proxy, stopping_level, b_m, a_sequence, tol.
std::string evidence_json_text(const EvidenceEstimate& evidence,
                               const std::vector<double>& a_sequence, double tol);

}  // namespace rarebayes
