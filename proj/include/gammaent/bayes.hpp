#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gammaent/diagnostics.hpp"
#include "gammaent/gamma_model.hpp"
#include "gammaent/mle.hpp"
#include "gammaent/random.hpp"

namespace gammaent::bayes {

/// Objective priors, expressed as weights on W (all are flat in H):
///   Jeffreys        √(Wψ'(W) − 1)
///   ReferenceBeta   √ψ'(W)
///   ReferenceAlpha  √((Wψ'(W) − 1) / W)
///   Matching        (Wψ'(W) − 1) / √W
enum class PriorKind { Jeffreys, ReferenceBeta, ReferenceAlpha, Matching };

inline constexpr std::array<PriorKind, 4> kAllPriors{
    PriorKind::Jeffreys, PriorKind::ReferenceBeta, PriorKind::ReferenceAlpha, PriorKind::Matching};

/// CLI spelling: jeffreys, ref-beta, ref-alpha, matching.
std::string_view to_string(PriorKind kind);
std::optional<PriorKind> parse_prior(std::string_view name);

/// Unnormalized log prior weight on W.
double log_prior(PriorKind kind, double W);

/// log π(W | x) up to a constant:
///   log_prior + log Γ(nW) − n log Γ(W) + W Σ log x − nW log Σ x.
double log_marginal_posterior_W(PriorKind kind, double W, const SampleStats& s);

/// log π(H | W, x) up to a constant: −nWH − δ(W, H) Σ x. Prior independent.
/// Throws Error(Overflow) when δ(W, H) is not representable.
double log_conditional_posterior_H(double H, double W, const SampleStats& s);

/// Exact draw from π(H | W, x): with u ~ Gamma(nW, rate δ(W, 0) Σx), H = −log u.
double exact_conditional_draw_H(double W, const SampleStats& s, Rng& rng);

/// E[H | W, x] = log(δ(W, 0) Σ x) − ψ(nW).
double conditional_mean_H(double W, const SampleStats& s);

struct McmcConfig {
  int R = 2000;
  int burn = 500;
  int jump = 5;
  double cW = 1.0;
  double seH = 0.2;
  std::uint64_t seed = 0;
  /// Starting point; the closed-form initializer (or an exponential fit
  /// when it fails) is used when empty.
  std::optional<EntropyParams> init;
  /// Draw H from its exact conditional instead of the random-walk step.
  bool exact_h_update = false;

  /// Throws Error(Config) unless R > burn ≥ 0, jump ≥ 1, cW > 0, seH > 0.
  void validate() const;
  /// floor((R − burn) / jump) + 1.
  std::size_t retained() const;
};

struct Chain {
  std::vector<double> draws_W;
  std::vector<double> draws_H;
  double acceptance_W = 0.0;
  double acceptance_H = 0.0;
};

/// Starting point used when McmcConfig::init is empty.
EntropyParams default_init(const SampleStats& s);

/// Collapsed MH-within-Gibbs sampler. Each iteration
///   (a) proposes W' ~ Gamma(shape cW·W, rate cW) and accepts against the
///       marginal posterior of W with the Hastings correction for the
///       asymmetric proposal;
///   (b) proposes H' ~ Normal(H, seH) and accepts against π(H | W', x).
/// The state after k iterations is retained for k = burn, burn + jump, …, R.
/// Proposals with a non-finite log target are rejected.
Chain mh_within_gibbs(PriorKind kind, const SampleStats& s, const McmcConfig& cfg);

struct PosteriorSummary {
  double mean_H;
  Interval ci_H;
  double mean_W;
  Interval ci_W;
  std::optional<diagnostics::GewekeResult> geweke;
  std::optional<double> ess_H;
  double acceptance_H;
  double acceptance_W;
};

/// Posterior mean and central credible interval at `level` (type-7
/// quantiles), plus Geweke and ESS on the H draws when the chain is long
/// enough and not constant.
PosteriorSummary summarize(const Chain& chain, double level = 0.95);

/// Result of integrating the marginal posterior of W (and the conditional
/// mean of H against it) over (0, ∞).
struct QuadratureResult {
  double log_normalizer;  // log ∫ exp(log_marginal_posterior_W) dW
  double mean_H;          // E[H | x]
  /// d log(integrand) / d log W at the lower cut-off; the integral near 0
  /// converges iff this exceeds −1.
  double lower_exponent_marginal;
  double lower_exponent_mean;
  /// −d log(integrand) / dW at the upper cut-off (exponential decay rate).
  double upper_decay_rate;
  double W_lower;
  double W_upper;
};

/// Deterministic posterior mean of H by adaptive Gauss–Kronrod quadrature
/// in log W. Tail cut-offs are placed where the power-law envelope at 0 and
/// the exponential envelope at ∞ bound the neglected mass below 1e−12 of
/// the integral. Throws Error(Quadrature) if either integral diverges at 0
/// (local exponent ≤ −1) or cannot be brought to tolerance.
QuadratureResult posterior_quadrature(PriorKind kind, const SampleStats& s);

/// posterior_quadrature(kind, s).mean_H.
double posterior_mean_quadrature(PriorKind kind, const SampleStats& s);

/// Numerical propriety check: whether ∫ π(W | x) dW converges. Unlike
/// posterior_quadrature this does not require a finite posterior mean.
struct ProprietyReport {
  bool proper;
  double log_normalizer;
  double lower_exponent;
  double upper_decay_rate;
};
ProprietyReport check_propriety(PriorKind kind, const SampleStats& s);

}  // namespace gammaent::bayes
