#include "gammaent/gamma_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gammaent/error.hpp"
#include "gammaent/specfun.hpp"

namespace gammaent {
namespace {

void require_shape(double W, const char* fn) {
  if (!(W > 0.0) || !std::isfinite(W)) {
    throw Error(ErrorKind::Domain, std::string(fn) + ": W must be positive and finite");
  }
}

}  // namespace

GammaParams GammaParams::checked(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::Domain, "gamma parameters must be positive and finite");
  }
  return {alpha, beta};
}

EntropyParams EntropyParams::checked(double W, double H) {
  require_shape(W, "EntropyParams");
  if (!std::isfinite(H)) throw Error(ErrorKind::Domain, "EntropyParams: H must be finite");
  return {W, H};
}

FisherInfo FisherInfo::inverse() const {
  const double det = determinant();
  return {hh / det, -wh / det, ww / det};
}

double entropy(const GammaParams& p) {
  const auto q = GammaParams::checked(p.alpha, p.beta);
  return log_delta1(q.alpha) - std::log(q.beta);
}

double sigma(double W) {
  require_shape(W, "sigma");
  return 1.0 + (1.0 - W) * specfun::trigamma(W);
}

double log_delta1(double W) {
  require_shape(W, "log_delta1");
  // W + log Γ(W) + (1 − W) ψ(W) with the Stirling terms cancelled by hand;
  // the direct sum loses all precision once W reaches ~1e8.
  return 0.5 * std::log(2.0 * std::numbers::pi * W) + specfun::ln_gamma_stirling_remainder(W) +
         (W - 1.0) * specfun::log_minus_digamma(W);
}

double log_delta(double W, double H) {
  if (!std::isfinite(H)) throw Error(ErrorKind::Domain, "log_delta: H must be finite");
  return log_delta1(W) - H;
}

double delta(double W, double H) {
  const double ld = log_delta(W, H);
  if (ld > std::log(std::numeric_limits<double>::max())) {
    throw Error(ErrorKind::Overflow, "delta: exp(" + std::to_string(ld) + ") overflows");
  }
  return std::exp(ld);
}

EntropyParams to_entropy_params(const GammaParams& p) {
  return {p.alpha, entropy(p)};
}

GammaParams from_entropy_params(const EntropyParams& e) {
  const auto q = EntropyParams::checked(e.W, e.H);
  return GammaParams::checked(q.W, delta(q.W, q.H));
}

FisherInfo fisher_info(double W) {
  require_shape(W, "fisher_info");
  const double tg = specfun::trigamma(W);
  const double s = 1.0 + (1.0 - W) * tg;
  return {tg - 2.0 * s + W * s * s, 1.0 - s * W, W};
}

double asymptotic_var_H(double W) {
  require_shape(W, "asymptotic_var_H");
  // (1 − W)² ψ' + 2 − W = (1 − W)² (ψ' − 1/W) + 1/W, positive since Wψ' > 1.
  const double d = 1.0 - W;
  return d * d * specfun::x_trigamma_minus_one(W) / W + 1.0 / W;
}

}  // namespace gammaent
