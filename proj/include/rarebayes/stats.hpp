#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rarebayes {

// Distribution-comparison utilities shared by the validate and demo-bias
// commands and by the test suites.

// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS distance against a CDF.
double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

// Asymptotic critical value sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(n m)).
double ks_critical_two_sample(double alpha, std::size_t n, std::size_t m);
double ks_critical_one_sample(double alpha, std::size_t n);

// Regularized incomplete gamma functions (series / continued fraction).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail probability of a chi-squared statistic with dof degrees.
double chi2_sf(double stat, double dof);

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t count = 0;

  double std_error() const;  // of the mean
};

MomentSummary summarize(const std::vector<double>& xs);

}  // namespace rarebayes
