#pragma once

#include <array>

namespace gammaent {

/// Gamma model in its natural parameters. `beta` is a RATE: the density is
///   f(x | α, β) = β^α / Γ(α) · x^(α−1) · exp(−β x),  x > 0.
struct GammaParams {
  double alpha;
  double beta;

  /// Throws Error(Domain) unless both parameters are positive and finite.
  static GammaParams checked(double alpha, double beta);
};

/// Entropy parametrization: W is the shape, H the differential entropy in nats.
struct EntropyParams {
  double W;
  double H;

  static EntropyParams checked(double W, double H);
};

/// Symmetric 2×2 matrix ordered (W, H).
struct FisherInfo {
  double ww;
  double wh;
  double hh;

  double determinant() const { return ww * hh - wh * wh; }
  /// Inverse as {ww, wh, hh}.
  FisherInfo inverse() const;
};

/// α − log β + log Γ(α) + (1 − α) ψ(α).
double entropy(const GammaParams& p);

/// σ(W) = 1 + (1 − W) ψ'(W); the derivative of log δ(W, H) with respect to W.
double sigma(double W);

/// log δ(W, 0) = W + log Γ(W) + (1 − W) ψ(W). Entropy of Gamma(W, rate 1).
double log_delta1(double W);

/// log δ(W, H) = log_delta1(W) − H, i.e. the log rate implied by (W, H).
double log_delta(double W, double H);

/// δ(W, H) = exp(log_delta(W, H)); throws Error(Overflow) when not representable.
double delta(double W, double H);

EntropyParams to_entropy_params(const GammaParams& p);
GammaParams from_entropy_params(const EntropyParams& e);

/// Per-observation Fisher information of the (W, H) model.
FisherInfo fisher_info(double W);

/// (1 − W)² ψ'(W) + 2 − W, the (H, H) entry of the inverse per-observation
/// information. Divide by n for the variance of Ĥ.
double asymptotic_var_H(double W);

}  // namespace gammaent
