#pragma once

namespace rarebayes {

// Standard normal density, CDF, complementary CDF, log CDF and quantile.
// The CDF pair is erfc-based (absolute error a few ULP, full relative
// accuracy in the lower tail). The quantile is a rational approximation
// refined by one Halley step against the erfc CDF; absolute error is
// well below 1e-12 across (0,1) and the tail branch keeps full relative
// accuracy down to denormal arguments.

double norm_pdf(double x);
double norm_cdf(double x);
double norm_cdf_complement(double x);
double norm_log_cdf(double x);
double norm_quantile(double p);

}  // namespace rarebayes
