#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rarebayes {

// Contract every updating problem plugs in through. evaluate() may return
// -inf for impossible data but never NaN or +inf.
class LogLikelihoodModel {
 public:
  virtual ~LogLikelihoodModel() = default;
  virtual std::size_t dim() const = 0;
  virtual double log_likelihood(std::span<const double> theta) const = 0;
  // Supremum of the log-likelihood when known in closed form; enables the
  // rejection oracle (c_max = exp(-value)) and some diagnostics.
  virtual std::optional<double> log_max_likelihood() const { return std::nullopt; }
  virtual std::string name() const = 0;
};

// Independent Gaussian observations d_j = theta_j + noise, noise ~ N(0, s^2),
// paired with standard normal priors. Evidence and posterior are available
// in closed form, which makes this the main cross-checking model.
class GaussianConjugateModel : public LogLikelihoodModel {
 public:
  GaussianConjugateModel(std::vector<double> data, double noise_std);

  std::size_t dim() const override { return data_.size(); }
  double log_likelihood(std::span<const double> theta) const override;
  std::optional<double> log_max_likelihood() const override;
  std::string name() const override { return "gaussian_conjugate"; }

  // ln integral N(d; theta, s^2 I) dPhi(theta) = sum_j ln N(d_j; 0, 1+s^2).
  double analytic_log_evidence() const;
  // Posterior mean per component, d_j / (1 + s^2).
  std::vector<double> posterior_mean() const;
  // Posterior std per component, s / sqrt(1 + s^2).
  double posterior_std() const;

  const std::vector<double>& data() const { return data_; }
  double noise_std() const { return noise_std_; }

 private:
  std::vector<double> data_;
  double noise_std_;
};

// Two-story shear frame updated with two measured natural frequencies.
// Parameters scale the nominal story stiffnesses and, in the unidentifiable
// variant, the nominal story masses as well.
struct ShearFrameSpec {
  double mass1 = 16.5e3;
  double mass2 = 16.1e3;
  double stiffness1 = 29.7e6;
  double stiffness2 = 29.7e6;
  double measured_f1 = 3.13;
  double measured_f2 = 9.83;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double epsilon = 0.1;
  bool include_normalization = false;
  bool scale_masses = false;  // true: theta = (k1, k2, m1, m2) scales

  void validate() const;

  bool operator==(const ShearFrameSpec&) const = default;
};

// Natural frequencies (Hz, ascending) of the frame at the given scales.
std::array<double, 2> shear_frequencies(const ShearFrameSpec& spec,
                                        std::span<const double> theta);

// Squared-ratio misfit J and the resulting log-likelihood -J/(2 eps^2).
double shear_misfit(const ShearFrameSpec& spec, std::span<const double> theta);
double shear_log_likelihood(const ShearFrameSpec& spec, std::span<const double> theta);

class ShearFrameModel : public LogLikelihoodModel {
 public:
  explicit ShearFrameModel(ShearFrameSpec spec);

  std::size_t dim() const override { return spec_.scale_masses ? 4 : 2; }
  double log_likelihood(std::span<const double> theta) const override;
  std::optional<double> log_max_likelihood() const override;
  std::string name() const override {
    return spec_.scale_masses ? "shear_unidentifiable" : "shear_identifiable";
  }

  const ShearFrameSpec& spec() const { return spec_; }

 private:
  ShearFrameSpec spec_;
};

// Adapter for ad-hoc models (tests, embedding callers).
class FunctionModel : public LogLikelihoodModel {
 public:
  FunctionModel(std::size_t dim, std::function<double(std::span<const double>)> fn,
                std::optional<double> log_max = std::nullopt,
                std::string name = "function")
      : dim_(dim), fn_(std::move(fn)), log_max_(log_max), name_(std::move(name)) {}

  std::size_t dim() const override { return dim_; }
  double log_likelihood(std::span<const double> theta) const override { return fn_(theta); }
  std::optional<double> log_max_likelihood() const override { return log_max_; }
  std::string name() const override { return name_; }

 private:
  std::size_t dim_;
  std::function<double(std::span<const double>)> fn_;
  std::optional<double> log_max_;
  std::string name_;
};

}  // namespace rarebayes
