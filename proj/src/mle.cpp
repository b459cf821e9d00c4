#include "gammaent/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "gammaent/error.hpp"
#include "gammaent/specfun.hpp"

namespace gammaent {

SampleStats SampleStats::from(std::span<const double> data) {
  if (data.size() < 2) {
    throw Error(ErrorKind::Size, "sample needs at least 2 values, got " + std::to_string(data.size()));
  }
  SampleStats s;
  s.data_.assign(data.begin(), data.end());
  s.min_ = std::numeric_limits<double>::infinity();
  s.max_ = -std::numeric_limits<double>::infinity();
  for (double x : s.data_) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(ErrorKind::Domain, "sample values must be positive and finite, got " + std::to_string(x));
    }
    const double lx = std::log(x);
    s.sum_x_ += x;
    s.sum_log_x_ += lx;
    s.sum_x_log_x_ += x * lx;
    s.min_ = std::min(s.min_, x);
    s.max_ = std::max(s.max_, x);
  }
  if (s.min_ == s.max_) {
    throw Error(ErrorKind::Degenerate, "sample needs at least two distinct values");
  }
  // log(mean) − mean(log x) = mean(u − log1p(u)) with u = x/mean − 1. Every
  // term is non-negative and O(u²), so nearly tied samples keep full
  // relative precision.
  const double mean = s.sum_x_ / static_cast<double>(s.data_.size());
  for (double x : s.data_) {
    const double u = (x - mean) / mean;
    s.log_mean_over_geomean_ += u - std::log1p(u);
  }
  s.log_mean_over_geomean_ /= static_cast<double>(s.data_.size());
  return s;
}

SampleStats SampleStats::scaled(double c) const {
  std::vector<double> out(data_);
  for (double& x : out) x *= c;
  return from(out);
}

GammaParams init_estimates(const SampleStats& s) {
  const double n = static_cast<double>(s.n());
  const double denom = n * s.sum_x_log_x() - s.sum_x() * s.sum_log_x();
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::Degenerate, "closed-form initializer: non-positive denominator");
  }
  if (s.n() <= 3) {
    throw Error(ErrorKind::Size, "closed-form initializer needs n > 3");
  }
  const double alpha = (n - 2.9) / n * n * s.sum_x() / denom;
  const double scale = denom / (n * n);
  return GammaParams::checked(alpha, 1.0 / scale);
}

double log_likelihood(const EntropyParams& e, const SampleStats& s) {
  const double n = static_cast<double>(s.n());
  const double ld = log_delta(e.W, e.H);
  return n * e.W * ld - n * specfun::ln_gamma(e.W) + (e.W - 1.0) * s.sum_log_x() -
         delta(e.W, e.H) * s.sum_x();
}

Gradient score(const EntropyParams& e, const SampleStats& s) {
  const double n = static_cast<double>(s.n());
  const double ld = log_delta(e.W, e.H);
  const double d = delta(e.W, e.H);
  const double sg = sigma(e.W);
  const double residual = n * e.W - d * s.sum_x();
  return {n * (ld - specfun::digamma(e.W)) + s.sum_log_x() + sg * residual, -residual};
}

Hessian hessian(const EntropyParams& e, const SampleStats& s) {
  const double n = static_cast<double>(s.n());
  const double d = delta(e.W, e.H);
  const double tg = specfun::trigamma(e.W);
  const double sg = 1.0 + (1.0 - e.W) * tg;
  const double dsg = -tg + (1.0 - e.W) * specfun::tetragamma(e.W);
  const double ds = d * s.sum_x();
  return {2.0 * n * sg + dsg * (n * e.W - ds) - n * tg - ds * sg * sg, -n + ds * sg, -ds};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Domain, "normal_quantile: p must be in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

namespace {

double safe_log_likelihood(const EntropyParams& e, const SampleStats& s) {
  if (!(e.W > 0.0) || !std::isfinite(e.W) || !std::isfinite(e.H)) {
    return -std::numeric_limits<double>::infinity();
  }
  try {
    const double ll = log_likelihood(e, s);
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

EntropyParams default_start(const SampleStats& s) {
  try {
    return to_entropy_params(init_estimates(s));
  } catch (const Error&) {
    // Exponential fit: W = 1, rate n / Σx.
    const double n = static_cast<double>(s.n());
    return {1.0, 1.0 - std::log(n / s.sum_x())};
  }
}

}  // namespace

MleFit fit_mle(const SampleStats& s, const MleOptions& options) {
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw Error(ErrorKind::Domain, "fit_mle: level must be in (0, 1)");
  }
  EntropyParams x = options.start ? *options.start : default_start(s);
  double ll = safe_log_likelihood(x, s);
  if (!std::isfinite(ll)) {
    x = default_start(s);
    ll = safe_log_likelihood(x, s);
  }
  const double n = static_cast<double>(s.n());

  int iter = 0;
  bool converged = false;
  for (; iter <= options.max_iterations; ++iter) {
    const Gradient g = score(x, s);
    if (std::max(std::fabs(g.dW), std::fabs(g.dH)) < options.score_tolerance) {
      converged = true;
      break;
    }
    if (iter == options.max_iterations) break;

    // Newton direction when the observed Hessian is negative definite,
    // Fisher scoring (always an ascent direction) otherwise.
    Hessian h = hessian(x, s);
    const double det = h.ww * h.hh - h.wh * h.wh;
    if (!(h.hh < 0.0 && det > 0.0)) {
      const FisherInfo fi = fisher_info(x.W);
      h = {-n * fi.ww, -n * fi.wh, -n * fi.hh};
    }
    const double hdet = h.ww * h.hh - h.wh * h.wh;
    const double stepW = -(h.hh * g.dW - h.wh * g.dH) / hdet;
    const double stepH = -(-h.wh * g.dW + h.ww * g.dH) / hdet;

    // Step halving; near the optimum the likelihood is flat to rounding, so
    // a step that loses no more than that is still accepted.
    const double slack = 1e-12 * (1.0 + std::fabs(ll));
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const EntropyParams trial{x.W + t * stepW, x.H + t * stepH};
      const double trial_ll = safe_log_likelihood(trial, s);
      if (trial_ll >= ll - slack) {
        x = trial;
        ll = trial_ll;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!converged) {
    throw Error(ErrorKind::Convergence,
                "fit_mle: score did not vanish after " + std::to_string(iter) + " iterations");
  }

  const double se = std::sqrt(asymptotic_var_H(x.W) / n);
  const double z = normal_quantile(0.5 + 0.5 * options.level);
  return {x, se, {x.H - z * se, x.H + z * se}, options.level, iter, true};
}

}  // namespace gammaent
