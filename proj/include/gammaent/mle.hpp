#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gammaent/gamma_model.hpp"

namespace gammaent {

/// Sufficient statistics of a positive sample, with the data retained for
/// goodness-of-fit work. Construction validates the sample: at least two
/// values, all positive and finite, not all equal.
class SampleStats {
 public:
  static SampleStats from(std::span<const double> data);

  std::size_t n() const { return data_.size(); }
  double sum_x() const { return sum_x_; }
  double sum_log_x() const { return sum_log_x_; }
  double sum_x_log_x() const { return sum_x_log_x_; }
  double min() const { return min_; }
  double max() const { return max_; }
  /// log(arithmetic mean / geometric mean); strictly positive.
  double log_mean_over_geomean() const { return log_mean_over_geomean_; }
  const std::vector<double>& data() const { return data_; }

  /// Same sample multiplied by c > 0.
  SampleStats scaled(double c) const;

 private:
  SampleStats() = default;

  std::vector<double> data_;
  double sum_x_ = 0.0;
  double sum_log_x_ = 0.0;
  double sum_x_log_x_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
  double log_mean_over_geomean_ = 0.0;
};

struct Gradient {
  double dW;
  double dH;
};

/// Symmetric Hessian of the log-likelihood in (W, H).
struct Hessian {
  double ww;
  double wh;
  double hh;
};

struct Interval {
  double lower;
  double upper;

  bool contains(double v) const { return lower <= v && v <= upper; }
  double width() const { return upper - lower; }
};

struct MleFit {
  EntropyParams estimate;
  double se_H;
  Interval ci_H;
  double level;
  int iterations;
  bool converged;
};

struct MleOptions {
  double level = 0.95;
  /// Starting point; when empty the closed-form initializer is used.
  std::optional<EntropyParams> start;
  int max_iterations = 200;
  double score_tolerance = 1e-8;
};

/// Closed-form initial (α̃, β̃). The textbook form of β̃ estimates the scale
/// Cov(X, log X); the returned `beta` is its reciprocal so it is a rate like
/// everywhere else. Throws Error(Size) for n ≤ 3.
GammaParams init_estimates(const SampleStats& s);

/// Full-sample log-likelihood Σ log f(xᵢ | α = W, β = δ(W, H)).
double log_likelihood(const EntropyParams& e, const SampleStats& s);

/// Analytic gradient of log_likelihood.
Gradient score(const EntropyParams& e, const SampleStats& s);

/// Analytic (observed) Hessian of log_likelihood.
Hessian hessian(const EntropyParams& e, const SampleStats& s);

/// Damped Newton maximization of the likelihood in (W, H) with a Wald
/// interval for H: Ĥ ± z · sqrt(asymptotic_var_H(Ŵ) / n).
/// Throws Error(Convergence) if the score is not below tolerance within
/// the iteration budget.
MleFit fit_mle(const SampleStats& s, const MleOptions& options = {});

/// Standard normal quantile.
double normal_quantile(double p);

}  // namespace gammaent
