#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gammaent/bayes.hpp"
#include "gammaent/error.hpp"
#include "gammaent/specfun.hpp"

using namespace gammaent;
using namespace gammaent::bayes;

namespace {

const std::vector<double> kSugarcane{11, 19, 36, 4, 8, 11, 39, 74, 168, 27, 116,
                                     3,  34, 1,  46, 12, 2, 56, 14, 52, 14};

std::vector<double> gamma_sample(double alpha, double rate, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.gamma(alpha) / rate;
  return x;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_critical_5pct(std::size_t n, std::size_t m) {
  return 1.358 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

double mc_standard_error(const std::vector<double>& draws) {
  const double m = diagnostics::mean(draws);
  double ss = 0.0;
  for (double v : draws) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / (draws.size() - 1));
  return sd / std::sqrt(diagnostics::effective_sample_size(draws));
}

}  // namespace

TEST_CASE("prior names round trip") {
  for (PriorKind k : kAllPriors) CHECK(parse_prior(to_string(k)) == k);
  CHECK(parse_prior("matching") == PriorKind::Matching);
  CHECK(parse_prior("ref-alpha") == PriorKind::ReferenceAlpha);
  CHECK_FALSE(parse_prior("flat").has_value());
}

TEST_CASE("prior algebra") {
  for (double t = -6.0; t <= 6.0; t += 0.05) {
    const double W = std::exp(t);
    const double j = log_prior(PriorKind::Jeffreys, W);
    CHECK(std::fabs(log_prior(PriorKind::ReferenceAlpha, W) - (j - 0.5 * std::log(W))) < 1e-12 * std::max(1.0, std::fabs(j)));
    CHECK(std::fabs(log_prior(PriorKind::Matching, W) - (2.0 * j - 0.5 * std::log(W))) < 1e-12 * std::max(1.0, std::fabs(j)));
    CHECK(log_prior(PriorKind::ReferenceAlpha, W) <= log_prior(PriorKind::ReferenceBeta, W) + 1e-15);
    CHECK(log_prior(PriorKind::ReferenceBeta, W) == doctest::Approx(0.5 * std::log(specfun::trigamma(W))).epsilon(1e-13));
  }
  CHECK_THROWS_AS(log_prior(PriorKind::Jeffreys, 0.0), Error);
}

TEST_CASE("marginal posterior of W at a hand-evaluated point") {
  const std::vector<double> x{1.0, std::exp(1.0)};
  const auto s = SampleStats::from(x);
  for (PriorKind k : kAllPriors) {
    const double want = 0.0 - 0.0 + 1.0 - 2.0 * std::log(1.0 + std::exp(1.0)) + log_prior(k, 1.0);
    CHECK(log_marginal_posterior_W(k, 1.0, s) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("conditional posterior of H") {
  const auto s = SampleStats::from(kSugarcane);
  for (double W : {0.3, 0.87, 4.0}) {
    const double mode = std::log(std::exp(log_delta1(W)) * s.sum_x() / (21.0 * W));
    const double at = log_conditional_posterior_H(mode, W, s);
    CHECK(at > log_conditional_posterior_H(mode - 1e-3, W, s));
    CHECK(at > log_conditional_posterior_H(mode + 1e-3, W, s));
    // In u = e^{-H}: Gamma(nW, rate δ₁Σx) kernel (log) plus the Jacobian log u.
    const double rate = std::exp(log_delta1(W)) * s.sum_x();
    for (double H : {mode - 2.0, mode, mode + 0.5}) {
      const double u = std::exp(-H);
      const double kernel = (21.0 * W - 1.0) * std::log(u) - rate * u;
      CHECK(log_conditional_posterior_H(H, W, s) == doctest::Approx(kernel + std::log(u)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(log_conditional_posterior_H(-1e6, 1.0, s), Error);
}

TEST_CASE("conditional mean identity") {
  const std::vector<double> x{0.25, 0.75};  // Σx = 1, n = 2
  const auto s = SampleStats::from(x);
  // nW = 1 gives the exponential case: E[H|W] = log δ₁(W) + γ.
  CHECK(conditional_mean_H(0.5, s) == doctest::Approx(log_delta1(0.5) + 0.5772156649015329).epsilon(1e-13));
  // W = 1 with Σx = 1: 1 − ψ(2).
  CHECK(conditional_mean_H(1.0, s) == doctest::Approx(1.0 - specfun::digamma(2.0)).epsilon(1e-13));

  const auto sug = SampleStats::from(kSugarcane);
  for (double c : {0.1, 3.0}) {
    CHECK(std::fabs(conditional_mean_H(1.3, sug.scaled(c)) - conditional_mean_H(1.3, sug) - std::log(c)) < 1e-12);
  }
}

TEST_CASE("exact conditional draws") {
  const auto s = SampleStats::from(kSugarcane);
  const double W = 0.9;
  Rng rng(123);
  const int n = 1000000;
  std::vector<double> draws(n);
  double m = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    draws[i] = exact_conditional_draw_H(W, s, rng);
    const double d = draws[i] - m;
    m += d / (i + 1);
    m2 += d * (draws[i] - m);
  }
  const double se = std::sqrt(m2 / (n - 1) / n);
  CHECK(std::fabs(m - conditional_mean_H(W, s)) < 3.0 * se);

  // KS against the conditional normalized by quadrature.
  const double mode = log_delta1(W) + std::log(s.sum_x() / (21.0 * W));
  const double peak = log_conditional_posterior_H(mode, W, s);
  auto dens = [&](double h) { return std::exp(log_conditional_posterior_H(h, W, s) - peak); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double lo = mode - 8.0, hi = mode + 3.0;
  const double z = GK::integrate(dens, lo, hi, 15, 1e-13);
  std::vector<double> sub(draws.begin(), draws.begin() + 20000);
  std::sort(sub.begin(), sub.end());
  double d = 0.0, prev_h = lo, cdf = 0.0;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const double h = std::clamp(sub[i], lo, hi);
    cdf += GK::integrate(dens, prev_h, h, 3, 1e-10) / z;
    prev_h = h;
    d = std::max({d, static_cast<double>(i + 1) / sub.size() - cdf, cdf - static_cast<double>(i) / sub.size()});
  }
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(sub.size())));
  // Closed form of the same CDF: P(H ≤ h) = 1 − P(nW, δ₁Σx·e^{−h}).
  const double rate = std::exp(log_delta1(W)) * s.sum_x();
  const double h_mid = sub[sub.size() / 2];
  const double quad_mid = GK::integrate(dens, lo, h_mid, 15, 1e-12) / z;
  CHECK(quad_mid == doctest::Approx(1.0 - specfun::reg_lower_inc_gamma(21.0 * W, rate * std::exp(-h_mid))).epsilon(1e-9));
}

TEST_CASE("quadrature posterior means on the sugarcane data") {
  const auto s = SampleStats::from(kSugarcane);
  CHECK(posterior_mean_quadrature(PriorKind::Jeffreys, s) == doctest::Approx(4.55853879).epsilon(1e-7));
  CHECK(posterior_mean_quadrature(PriorKind::ReferenceBeta, s) == doctest::Approx(4.55581625).epsilon(1e-7));
  CHECK(posterior_mean_quadrature(PriorKind::ReferenceAlpha, s) == doctest::Approx(4.55166189).epsilon(1e-7));
  const double matching = posterior_mean_quadrature(PriorKind::Matching, s);
  CHECK(matching == doctest::Approx(4.54138644).epsilon(1e-7));
  CHECK(std::fabs(matching - 4.55) < 0.05);
}

TEST_CASE("two-point data set") {
  const std::vector<double> x{1.0, std::exp(1.0)};
  const auto s = SampleStats::from(x);
  for (PriorKind k : kAllPriors) CHECK(check_propriety(k, s).proper);
  CHECK(posterior_mean_quadrature(PriorKind::Jeffreys, s) == doctest::Approx(1.26755772).epsilon(1e-7));
  // E[H | W] ~ −(n−1)/(nW) near zero, so priors that grow like 1/W or faster
  // lose the posterior mean at n = 2.
  for (PriorKind k : {PriorKind::ReferenceBeta, PriorKind::ReferenceAlpha, PriorKind::Matching}) {
    try {
      posterior_mean_quadrature(k, s);
      FAIL("expected divergence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Quadrature);
    }
  }
}

TEST_CASE("propriety on random data sets") {
  Rng pick(606);
  for (int n : {2, 5, 20}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto s = SampleStats::from(gamma_sample(0.2 + 5.0 * pick.uniform(), 1.0, n, 40 * n + rep));
      for (PriorKind k : kAllPriors) {
        const auto r = check_propriety(k, s);
        CHECK(r.proper);
        CHECK(std::isfinite(r.log_normalizer));
        CHECK(r.lower_exponent > -1.0);
        CHECK(r.upper_decay_rate > 0.0);
      }
    }
  }
}

TEST_CASE("nearly tied observations") {
  // q = log(mean/geomean) ≈ 5e−8 pushes posterior mass of W out to ~1e8.
  const std::vector<double> x{0.419746, 0.419473};
  const auto s = SampleStats::from(x);
  CHECK(s.log_mean_over_geomean() == doctest::Approx(5.2869e-8).epsilon(1e-3));
  for (PriorKind k : kAllPriors) CHECK(check_propriety(k, s).proper);
  const auto q = posterior_quadrature(PriorKind::Jeffreys, s);
  CHECK(std::isfinite(q.mean_H));
  CHECK(q.W_upper > 1e8);
  const std::vector<double> y{0.419746, 0.419473, 0.4196, 0.41971, 0.41955};
  for (PriorKind k : kAllPriors) CHECK(std::isfinite(posterior_mean_quadrature(k, SampleStats::from(y))));
}

TEST_CASE("quadrature mean shifts by log c under scaling") {
  const auto s = SampleStats::from(gamma_sample(2.0, 0.5, 15, 3));
  for (PriorKind k : kAllPriors) {
    const double base = posterior_mean_quadrature(k, s);
    CHECK(std::fabs(posterior_mean_quadrature(k, s.scaled(8.0)) - base - std::log(8.0)) < 1e-6);
  }
}

TEST_CASE("sampler configuration") {
  McmcConfig cfg;
  CHECK(cfg.R == 2000);
  CHECK(cfg.burn == 500);
  CHECK(cfg.jump == 5);
  CHECK(cfg.cW == 1.0);
  CHECK(cfg.seH == 0.2);
  CHECK(cfg.retained() == 301);
  const auto s = SampleStats::from(kSugarcane);
  CHECK(mh_within_gibbs(PriorKind::Matching, s, cfg).draws_H.size() == 301);
  for (auto mutate : {+[](McmcConfig& c) { c.R = 0; }, +[](McmcConfig& c) { c.burn = 2000; },
                      +[](McmcConfig& c) { c.jump = 0; }, +[](McmcConfig& c) { c.cW = 0.0; },
                      +[](McmcConfig& c) { c.seH = -1.0; }}) {
    McmcConfig bad;
    mutate(bad);
    try {
      mh_within_gibbs(PriorKind::Matching, s, bad);
      FAIL("expected a configuration error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
    }
  }
}

TEST_CASE("chains are reproducible") {
  const auto s = SampleStats::from(kSugarcane);
  McmcConfig cfg;
  cfg.seed = 77;
  const auto a = mh_within_gibbs(PriorKind::Jeffreys, s, cfg);
  const auto b = mh_within_gibbs(PriorKind::Jeffreys, s, cfg);
  CHECK(a.draws_W == b.draws_W);
  CHECK(a.draws_H == b.draws_H);
  CHECK(a.acceptance_H == b.acceptance_H);
  cfg.seed = 78;
  CHECK(mh_within_gibbs(PriorKind::Jeffreys, s, cfg).draws_H != a.draws_H);
}

TEST_CASE("H acceptance rate at the default step size") {
  const auto s = SampleStats::from(gamma_sample(2.0, 0.5, 50, 2021));
  McmcConfig cfg;
  cfg.seed = 5;
  const auto chain = mh_within_gibbs(PriorKind::Matching, s, cfg);
  CHECK(chain.acceptance_H >= 0.35);
  CHECK(chain.acceptance_H <= 0.60);
}

TEST_CASE("sampler agrees with the quadrature oracle") {
  const auto s = SampleStats::from(kSugarcane);
  McmcConfig cfg;
  cfg.R = 20000;
  cfg.seed = 2718;
  for (PriorKind k : kAllPriors) {
    const auto chain = mh_within_gibbs(k, s, cfg);
    const double diff = diagnostics::mean(chain.draws_H) - posterior_mean_quadrature(k, s);
    CAPTURE(to_string(k));
    CHECK(std::fabs(diff) < 3.0 * mc_standard_error(chain.draws_H));
  }
}

TEST_CASE("exact H update is statistically indistinguishable") {
  const auto s = SampleStats::from(gamma_sample(2.0, 0.5, 30, 9));
  McmcConfig cfg;
  cfg.R = 100000;
  cfg.jump = 50;
  cfg.seed = 314;
  const auto mh = mh_within_gibbs(PriorKind::Matching, s, cfg);
  cfg.exact_h_update = true;
  cfg.seed = 315;
  const auto exact = mh_within_gibbs(PriorKind::Matching, s, cfg);
  CHECK(exact.acceptance_H == 1.0);
  CHECK(ks_two_sample(mh.draws_H, exact.draws_H) < ks_critical_5pct(mh.draws_H.size(), exact.draws_H.size()));
}

TEST_CASE("scaling the data shifts H draws and leaves W in distribution") {
  const auto s = SampleStats::from(gamma_sample(2.0, 0.5, 30, 10));
  McmcConfig cfg;
  cfg.R = 100000;
  cfg.jump = 50;
  cfg.seed = 99;
  const auto base = mh_within_gibbs(PriorKind::Matching, s, cfg);
  const auto scaled = mh_within_gibbs(PriorKind::Matching, s.scaled(20.0), cfg);
  CHECK(ks_two_sample(base.draws_W, scaled.draws_W) < ks_critical_5pct(base.draws_W.size(), scaled.draws_W.size()));
  const double shift = diagnostics::mean(scaled.draws_H) - diagnostics::mean(base.draws_H);
  CHECK(std::fabs(shift - std::log(20.0)) < 3.0 * std::sqrt(2.0) * mc_standard_error(base.draws_H));
}

TEST_CASE("posterior summary") {
  const auto s = SampleStats::from(kSugarcane);
  McmcConfig cfg;
  cfg.R = 20000;
  cfg.seed = 1;
  const auto sum = summarize(mh_within_gibbs(PriorKind::Matching, s, cfg));
  CHECK(sum.ci_H.contains(sum.mean_H));
  CHECK(sum.ci_W.contains(sum.mean_W));
  REQUIRE(sum.geweke.has_value());
  REQUIRE(sum.ess_H.has_value());
  CHECK(*sum.ess_H > 500.0);
  CHECK(sum.acceptance_W > 0.0);
  CHECK(sum.acceptance_W < 1.0);
}
