#pragma once

// Real-argument special functions used throughout the library. All are pure,
// deterministic and thread-safe; invalid arguments raise Error(Domain).

namespace gammaent::specfun {

/// log Γ(x) for x > 0.
double ln_gamma(double x);

/// ψ(x) = d/dx log Γ(x) for x > 0.
double digamma(double x);

/// ψ'(x) for x > 0.
double trigamma(double x);

/// ψ''(x) for x > 0. Only needed by the observed-information Hessian.
double tetragamma(double x);

/// log Γ(x) − [(x − ½) log x − x + ½ log 2π], the Stirling remainder
/// (≈ 1/(12x) for large x). Lets callers cancel the large Stirling terms
/// of log-gamma differences analytically.
double ln_gamma_stirling_remainder(double x);

/// log x − ψ(x) for x > 0 (≈ 1/(2x) for large x), free of cancellation.
double log_minus_digamma(double x);

/// x·ψ'(x) − 1 for x > 0, evaluated without the cancellation that the
/// direct product suffers for large x. Strictly positive.
double x_trigamma_minus_one(double x);

/// Regularized lower incomplete gamma P(a, x) = γ(a, x) / Γ(a), a > 0, x ≥ 0.
/// Series for x < a + 1, Lentz continued fraction for the complement otherwise.
double reg_lower_inc_gamma(double a, double x);

}  // namespace gammaent::specfun
