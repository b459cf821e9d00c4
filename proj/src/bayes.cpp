#include "gammaent/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gammaent/error.hpp"
#include "gammaent/specfun.hpp"

namespace gammaent::bayes {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_shape(double W, const char* fn) {
  if (!(W > 0.0) || !std::isfinite(W)) {
    throw Error(ErrorKind::Domain, std::string(fn) + ": W must be positive and finite");
  }
}

// Evaluates f, mapping library errors and non-finite results to −∞ so that
// the sampler rejects the proposal instead of aborting.
template <typename F>
double finite_or_neg_inf(F&& f) {
  try {
    const double v = f();
    return std::isfinite(v) ? v : kNegInf;
  } catch (const Error&) {
    return kNegInf;
  }
}

double log_gamma_density(double x, double shape, double rate) {
  return shape * std::log(rate) - specfun::ln_gamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

// −nWH − exp(ld1 − H) Σx with ld1 = log δ(W, 0) precomputed.
double conditional_H_kernel(double H, double nW, double ld1, double sum_x) {
  const double ld = ld1 - H;
  if (ld > std::log(std::numeric_limits<double>::max())) return kNegInf;
  return -nW * H - std::exp(ld) * sum_x;
}

}  // namespace

std::string_view to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::Jeffreys: return "jeffreys";
    case PriorKind::ReferenceBeta: return "ref-beta";
    case PriorKind::ReferenceAlpha: return "ref-alpha";
    case PriorKind::Matching: return "matching";
  }
  return "unknown";
}

std::optional<PriorKind> parse_prior(std::string_view name) {
  for (PriorKind k : kAllPriors) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

double log_prior(PriorKind kind, double W) {
  require_shape(W, "log_prior");
  switch (kind) {
    case PriorKind::Jeffreys:
      return 0.5 * std::log(specfun::x_trigamma_minus_one(W));
    case PriorKind::ReferenceBeta:
      return 0.5 * std::log(specfun::trigamma(W));
    case PriorKind::ReferenceAlpha:
      return 0.5 * std::log(specfun::x_trigamma_minus_one(W)) - 0.5 * std::log(W);
    case PriorKind::Matching:
      return std::log(specfun::x_trigamma_minus_one(W)) - 0.5 * std::log(W);
  }
  throw Error(ErrorKind::Domain, "log_prior: unknown prior");
}

double log_marginal_posterior_W(PriorKind kind, double W, const SampleStats& s) {
  require_shape(W, "log_marginal_posterior_W");
  const double n = static_cast<double>(s.n());
  // log Γ(nW) − n log Γ(W) + W Σ log x − nW log Σx, rearranged so the
  // O(nW log W) Stirling terms cancel analytically; q = log(mean/geomean).
  const double v = log_prior(kind, W) + 0.5 * (n - 1.0) * std::log(W / (2.0 * std::numbers::pi)) -
                   0.5 * std::log(n) + specfun::ln_gamma_stirling_remainder(n * W) -
                   n * specfun::ln_gamma_stirling_remainder(W) - n * W * s.log_mean_over_geomean();
  if (!std::isfinite(v)) throw Error(ErrorKind::Overflow, "log_marginal_posterior_W: not finite");
  return v;
}

double log_conditional_posterior_H(double H, double W, const SampleStats& s) {
  require_shape(W, "log_conditional_posterior_H");
  if (!std::isfinite(H)) throw Error(ErrorKind::Domain, "log_conditional_posterior_H: H must be finite");
  const double n = static_cast<double>(s.n());
  const double v = conditional_H_kernel(H, n * W, log_delta1(W), s.sum_x());
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::Overflow, "log_conditional_posterior_H: δ(W, H) overflows");
  }
  return v;
}

double exact_conditional_draw_H(double W, const SampleStats& s, Rng& rng) {
  require_shape(W, "exact_conditional_draw_H");
  const double n = static_cast<double>(s.n());
  // u = g / (δ₁ Σx) with g ~ Gamma(nW, 1); H = −log u.
  return log_delta1(W) + std::log(s.sum_x()) - rng.log_gamma_variate(n * W);
}

double conditional_mean_H(double W, const SampleStats& s) {
  require_shape(W, "conditional_mean_H");
  const double n = static_cast<double>(s.n());
  return log_delta1(W) + std::log(s.sum_x()) - specfun::digamma(n * W);
}

void McmcConfig::validate() const {
  if (R <= 0) throw Error(ErrorKind::Config, "R must be positive");
  if (burn < 0 || burn >= R) throw Error(ErrorKind::Config, "burn must satisfy 0 <= burn < R");
  if (jump < 1) throw Error(ErrorKind::Config, "jump must be at least 1");
  if (!(cW > 0.0) || !std::isfinite(cW)) throw Error(ErrorKind::Config, "cW must be positive");
  if (!(seH > 0.0) || !std::isfinite(seH)) throw Error(ErrorKind::Config, "seH must be positive");
  if (init) EntropyParams::checked(init->W, init->H);
}

std::size_t McmcConfig::retained() const {
  return static_cast<std::size_t>((R - burn) / jump) + 1;
}

EntropyParams default_init(const SampleStats& s) {
  try {
    return to_entropy_params(init_estimates(s));
  } catch (const Error&) {
    const double n = static_cast<double>(s.n());
    return {1.0, 1.0 - std::log(n / s.sum_x())};
  }
}

Chain mh_within_gibbs(PriorKind kind, const SampleStats& s, const McmcConfig& cfg) {
  cfg.validate();
  const EntropyParams start = cfg.init ? *cfg.init : default_init(s);
  const double n = static_cast<double>(s.n());
  const double sum_x = s.sum_x();
  const double log_sum_x = std::log(sum_x);

  auto target_W = [&](double W) {
    return finite_or_neg_inf([&] { return log_marginal_posterior_W(kind, W, s); });
  };

  Rng rng(cfg.seed);
  Chain chain;
  chain.draws_W.reserve(cfg.retained());
  chain.draws_H.reserve(cfg.retained());

  double W = start.W;
  double H = start.H;
  double lp_W = target_W(W);
  long accepted_W = 0;
  long accepted_H = 0;

  auto retain = [&](int k) {
    if (k >= cfg.burn && (k - cfg.burn) % cfg.jump == 0) {
      chain.draws_W.push_back(W);
      chain.draws_H.push_back(H);
    }
  };
  retain(0);

  for (int k = 1; k <= cfg.R; ++k) {
    // (a) W | x, independence of H by marginalization.
    const double prop_W = rng.gamma(cfg.cW * W) / cfg.cW;
    const double u1 = rng.uniform();
    if (prop_W > 0.0 && std::isfinite(prop_W)) {
      const double lp_prop = target_W(prop_W);
      const double hastings = finite_or_neg_inf([&] {
        return log_gamma_density(W, cfg.cW * prop_W, cfg.cW) -
               log_gamma_density(prop_W, cfg.cW * W, cfg.cW);
      });
      const double log_ratio = lp_prop - lp_W + hastings;
      if (std::isfinite(log_ratio) && u1 < std::exp(std::min(0.0, log_ratio))) {
        W = prop_W;
        lp_W = lp_prop;
        ++accepted_W;
      }
    }

    // (b) H | W, x.
    const double ld1 = log_delta1(W);
    if (cfg.exact_h_update) {
      H = ld1 + log_sum_x - rng.log_gamma_variate(n * W);
      ++accepted_H;
    } else {
      const double prop_H = rng.normal(H, cfg.seH);
      const double u2 = rng.uniform();
      // Symmetric random walk: the Hastings term is identically zero.
      const double log_ratio = conditional_H_kernel(prop_H, n * W, ld1, sum_x) -
                               conditional_H_kernel(H, n * W, ld1, sum_x);
      if (std::isfinite(log_ratio) && u2 < std::exp(std::min(0.0, log_ratio))) {
        H = prop_H;
        ++accepted_H;
      }
    }
    retain(k);
  }

  chain.acceptance_W = static_cast<double>(accepted_W) / cfg.R;
  chain.acceptance_H = static_cast<double>(accepted_H) / cfg.R;
  return chain;
}

PosteriorSummary summarize(const Chain& chain, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::Domain, "summarize: level must be in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  PosteriorSummary out{};
  out.mean_H = diagnostics::mean(chain.draws_H);
  out.ci_H = diagnostics::credible_interval(chain.draws_H, tail, 1.0 - tail);
  out.mean_W = diagnostics::mean(chain.draws_W);
  out.ci_W = diagnostics::credible_interval(chain.draws_W, tail, 1.0 - tail);
  try {
    out.geweke = diagnostics::geweke_z(chain.draws_H);
    out.ess_H = diagnostics::effective_sample_size(chain.draws_H);
  } catch (const Error&) {
    // Short or constant chains carry no diagnostics.
  }
  out.acceptance_H = chain.acceptance_H;
  out.acceptance_W = chain.acceptance_W;
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature oracle.
//
// Integrals over W ∈ (0, ∞) are taken in t = log W, where an integrand
// behaving like W^p at 0 becomes exp((p + 1) t) and the AM–GM gap makes the
// upper tail decay like exp(−n q e^t). Cut-offs are found by walking away
// from the peak until the envelope bound on the neglected tail drops below
// kTailTolerance times the peak height.
namespace {

constexpr double kTailTolerance = 1e-15;
constexpr double kTMin = -300.0;  // W ≈ 5e−131; ψ' is still representable
constexpr double kTMax = 60.0;
constexpr double kSlopeStep = 0.5;
constexpr double kDivergentSlope = 1e-3;

struct TailCut {
  double t;
  double slope;  // d/dt of the log integrand at the cut
};

struct LogIntegrand {
  std::function<double(double)> log_f;  // log integrand in t, may be −∞

  double slope(double t) const {
    return (log_f(t + kSlopeStep) - log_f(t - kSlopeStep)) / (2.0 * kSlopeStep);
  }
};

double find_peak(const LogIntegrand& g, double& peak_value) {
  double best_t = 0.0;
  peak_value = kNegInf;
  for (double t = -40.0; t <= 40.0; t += 0.25) {
    const double v = g.log_f(t);
    if (v > peak_value) {
      peak_value = v;
      best_t = t;
    }
  }
  if (!std::isfinite(peak_value)) throw Error(ErrorKind::Quadrature, "integrand vanishes on the search grid");
  return best_t;
}

TailCut lower_cut(const LogIntegrand& g, double t_peak, double& peak_value) {
  for (double t = t_peak - 1.0; t >= kTMin; t -= 1.0) {
    const double v = g.log_f(t);
    peak_value = std::max(peak_value, v);
    const double sl = g.slope(t);
    // Mass below t is at most exp(v) / slope while the slope keeps rising.
    if (sl > kDivergentSlope && v - std::log(sl) - peak_value < std::log(kTailTolerance)) {
      return {t, sl};
    }
  }
  const double sl = g.slope(kTMin);
  if (!(sl > kDivergentSlope)) {
    throw Error(ErrorKind::Quadrature,
                "integral diverges at W -> 0: integrand ~ W^" + std::to_string(sl - 1.0));
  }
  throw Error(ErrorKind::Quadrature, "lower tail could not be truncated to tolerance");
}

TailCut upper_cut(const LogIntegrand& g, double t_peak, double& peak_value) {
  for (double t = t_peak + 0.5; t <= kTMax; t += 0.5) {
    const double v = g.log_f(t);
    if (v == kNegInf) return {t, kNegInf};
    peak_value = std::max(peak_value, v);
    const double sl = g.slope(t);
    if (sl < -1.0 && v - std::log(-sl) - peak_value < std::log(kTailTolerance)) {
      return {t, sl};
    }
  }
  throw Error(ErrorKind::Quadrature, "upper tail could not be truncated to tolerance");
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13, &error, &l1);
  if (!std::isfinite(value) || error > 1e-9 * std::max(l1, 1e-300)) {
    throw Error(ErrorKind::Quadrature, "adaptive quadrature did not reach tolerance");
  }
  return value;
}

LogIntegrand marginal_integrand(PriorKind kind, const SampleStats& s) {
  return {[kind, &s](double t) {
    return finite_or_neg_inf([&] { return log_marginal_posterior_W(kind, std::exp(t), s) + t; });
  }};
}

}  // namespace

ProprietyReport check_propriety(PriorKind kind, const SampleStats& s) {
  const LogIntegrand g = marginal_integrand(kind, s);
  double peak = kNegInf;
  const double t_peak = find_peak(g, peak);
  ProprietyReport rep{false, kNegInf, g.slope(kTMin) - 1.0, 0.0};
  try {
    const TailCut lo = lower_cut(g, t_peak, peak);
    const TailCut hi = upper_cut(g, t_peak, peak);
    const double mass = integrate([&](double t) { return std::exp(g.log_f(t) - peak); }, lo.t, hi.t);
    rep.proper = std::isfinite(mass) && mass > 0.0;
    rep.log_normalizer = std::log(mass) + peak;
    rep.lower_exponent = lo.slope - 1.0;
    rep.upper_decay_rate = -hi.slope / std::exp(hi.t);
  } catch (const Error&) {
    rep.proper = false;
  }
  return rep;
}

QuadratureResult posterior_quadrature(PriorKind kind, const SampleStats& s) {
  const LogIntegrand g = marginal_integrand(kind, s);
  double peak = kNegInf;
  const double t_peak = find_peak(g, peak);
  const TailCut lo = lower_cut(g, t_peak, peak);
  const TailCut hi = upper_cut(g, t_peak, peak);
  const double mass = integrate([&](double t) { return std::exp(g.log_f(t) - peak); }, lo.t, hi.t);

  // |E[H | W]| π(W | x) has its own envelope: one extra power of 1/W at 0.
  const LogIntegrand gm{[&](double t) {
    const double lf = g.log_f(t);
    if (lf == kNegInf) return kNegInf;
    return finite_or_neg_inf([&] { return lf + std::log(std::fabs(conditional_mean_H(std::exp(t), s))); });
  }};
  double peak_m = peak;
  const TailCut lo_m = lower_cut(gm, t_peak, peak_m);
  const TailCut hi_m = upper_cut(gm, t_peak, peak_m);
  const double a = std::min(lo.t, lo_m.t);
  const double b = std::max(hi.t, hi_m.t);
  const double weighted = integrate(
      [&](double t) {
        const double lf = g.log_f(t);
        if (lf == kNegInf) return 0.0;
        return conditional_mean_H(std::exp(t), s) * std::exp(lf - peak);
      },
      a, b);
  const double mass_full =
      (a < lo.t || b > hi.t) ? integrate([&](double t) { return std::exp(g.log_f(t) - peak); }, a, b)
                             : mass;

  QuadratureResult out{};
  out.log_normalizer = std::log(mass_full) + peak;
  out.mean_H = weighted / mass_full;
  out.lower_exponent_marginal = lo.slope - 1.0;
  out.lower_exponent_mean = lo_m.slope - 1.0;
  out.upper_decay_rate = -hi.slope / std::exp(hi.t);
  out.W_lower = std::exp(a);
  out.W_upper = std::exp(b);
  return out;
}

double posterior_mean_quadrature(PriorKind kind, const SampleStats& s) {
  return posterior_quadrature(kind, s).mean_H;
}

}  // namespace gammaent::bayes
