#include "rarebayes/models.hpp"

#include <cmath>
#include <stdexcept>

#include "rarebayes/errors.hpp"

namespace rarebayes {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;
constexpr double kTwoPi = 6.283185307179586;
}  // namespace

GaussianConjugateModel::GaussianConjugateModel(std::vector<double> data, double noise_std)
    : data_(std::move(data)), noise_std_(noise_std) {
  if (data_.empty()) throw std::invalid_argument("gaussian_conjugate: data must be non-empty");
  if (!(noise_std_ > 0.0) || !std::isfinite(noise_std_))
    throw std::invalid_argument("gaussian_conjugate: noise std must be positive");
  for (double d : data_)
    if (!std::isfinite(d)) throw std::invalid_argument("gaussian_conjugate: non-finite datum");
}

double GaussianConjugateModel::log_likelihood(std::span<const double> theta) const {
  if (theta.size() != data_.size())
    throw ModelError("gaussian_conjugate: theta dimension mismatch");
  double s2 = noise_std_ * noise_std_;
  double acc = 0.0;
  for (std::size_t j = 0; j < data_.size(); ++j) {
    double r = data_[j] - theta[j];
    acc += -std::log(noise_std_) - kLogSqrt2Pi - r * r / (2.0 * s2);
  }
  return acc;
}

std::optional<double> GaussianConjugateModel::log_max_likelihood() const {
  return static_cast<double>(data_.size()) * (-std::log(noise_std_) - kLogSqrt2Pi);
}

double GaussianConjugateModel::analytic_log_evidence() const {
  double v = 1.0 + noise_std_ * noise_std_;
  double acc = 0.0;
  for (double d : data_) acc += -0.5 * std::log(kTwoPi * v) - d * d / (2.0 * v);
  return acc;
}

std::vector<double> GaussianConjugateModel::posterior_mean() const {
  double v = 1.0 + noise_std_ * noise_std_;
  std::vector<double> m(data_.size());
  for (std::size_t j = 0; j < data_.size(); ++j) m[j] = data_[j] / v;
  return m;
}

double GaussianConjugateModel::posterior_std() const {
  return noise_std_ / std::sqrt(1.0 + noise_std_ * noise_std_);
}

void ShearFrameSpec::validate() const {
  if (!(mass1 > 0.0 && mass2 > 0.0 && stiffness1 > 0.0 && stiffness2 > 0.0))
    throw std::invalid_argument("shear frame: nominal masses and stiffnesses must be positive");
  if (!(measured_f1 > 0.0 && measured_f2 > 0.0))
    throw std::invalid_argument("shear frame: measured frequencies must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("shear frame: epsilon must be positive");
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2))
    throw std::invalid_argument("shear frame: non-finite mode weight");
}

std::array<double, 2> shear_frequencies(const ShearFrameSpec& spec,
                                        std::span<const double> theta) {
  std::size_t want = spec.scale_masses ? 4 : 2;
  if (theta.size() != want) throw ModelError("shear frame: theta dimension mismatch");
  for (double t : theta)
    if (!(t > 0.0) || !std::isfinite(t))
      throw ModelError("shear frame: scaling parameters must be positive and finite");
  double k1 = theta[0] * spec.stiffness1;
  double k2 = theta[1] * spec.stiffness2;
  double m1 = spec.scale_masses ? theta[2] * spec.mass1 : spec.mass1;
  double m2 = spec.scale_masses ? theta[3] * spec.mass2 : spec.mass2;
  // det(K - w^2 M) = 0 for K = [[k1+k2, -k2], [-k2, k2]], M = diag(m1, m2)
  // gives m1 m2 w^4 - (m1 k2 + m2 (k1+k2)) w^2 + k1 k2 = 0.
  double a = m1 * m2;
  double b = m1 * k2 + m2 * (k1 + k2);
  double c = k1 * k2;
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) disc = 0.0;  // roots are real; shield rounding
  double root = std::sqrt(disc);
  double w2_hi = (b + root) / (2.0 * a);
  double w2_lo = c / (a * w2_hi);  // product of roots = c/a, avoids cancellation
  return {std::sqrt(w2_lo) / kTwoPi, std::sqrt(w2_hi) / kTwoPi};
}

double shear_misfit(const ShearFrameSpec& spec, std::span<const double> theta) {
  auto f = shear_frequencies(spec, theta);
  double r1 = spec.lambda1 * (f[0] * f[0] / (spec.measured_f1 * spec.measured_f1) - 1.0);
  double r2 = spec.lambda2 * (f[1] * f[1] / (spec.measured_f2 * spec.measured_f2) - 1.0);
  return r1 * r1 + r2 * r2;
}

double shear_log_likelihood(const ShearFrameSpec& spec, std::span<const double> theta) {
  double ll = -shear_misfit(spec, theta) / (2.0 * spec.epsilon * spec.epsilon);
  if (spec.include_normalization) ll += -2.0 * (std::log(spec.epsilon) + kLogSqrt2Pi);
  return ll;
}

ShearFrameModel::ShearFrameModel(ShearFrameSpec spec) : spec_(spec) { spec_.validate(); }

double ShearFrameModel::log_likelihood(std::span<const double> theta) const {
  return shear_log_likelihood(spec_, theta);
}

std::optional<double> ShearFrameModel::log_max_likelihood() const {
  // Both measured frequencies are attainable, so the misfit reaches zero.
  return spec_.include_normalization ? -2.0 * (std::log(spec_.epsilon) + kLogSqrt2Pi) : 0.0;
}

}  // namespace rarebayes
