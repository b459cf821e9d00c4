#include "gammaent/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "gammaent/error.hpp"
#include "gammaent/specfun.hpp"

namespace gammaent::simlab {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::MLE: return "mle";
    case Estimator::Jeffreys: return "jeffreys";
    case Estimator::ReferenceBeta: return "ref-beta";
    case Estimator::ReferenceAlpha: return "ref-alpha";
    case Estimator::Matching: return "matching";
  }
  return "unknown";
}

std::optional<Estimator> parse_estimator(std::string_view name) {
  for (Estimator e : kAllEstimators) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

std::optional<bayes::PriorKind> prior_of(Estimator e) {
  switch (e) {
    case Estimator::MLE: return std::nullopt;
    case Estimator::Jeffreys: return bayes::PriorKind::Jeffreys;
    case Estimator::ReferenceBeta: return bayes::PriorKind::ReferenceBeta;
    case Estimator::ReferenceAlpha: return bayes::PriorKind::ReferenceAlpha;
    case Estimator::Matching: return bayes::PriorKind::Matching;
  }
  return std::nullopt;
}

std::vector<double> sample_gamma(const GammaParams& p, std::size_t n, Rng& rng) {
  const auto q = GammaParams::checked(p.alpha, p.beta);
  std::vector<double> out(n);
  for (double& x : out) x = rng.gamma(q.alpha) / q.beta;
  return out;
}

double gamma_cdf(const GammaParams& p, double x) {
  if (x <= 0.0) return 0.0;
  return specfun::reg_lower_inc_gamma(p.alpha, p.beta * x);
}

double ks_statistic(std::span<const double> data, const GammaParams& p) {
  if (data.empty()) throw Error(ErrorKind::Size, "ks_statistic: empty sample");
  const auto q = GammaParams::checked(p.alpha, p.beta);
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = gamma_cdf(q, sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

void StudyConfig::validate() const {
  GammaParams::checked(true_params.alpha, true_params.beta);
  if (replicates < 1) throw Error(ErrorKind::Config, "replicates must be at least 1");
  if (sample_sizes.empty()) throw Error(ErrorKind::Config, "sample_sizes must not be empty");
  for (int n : sample_sizes) {
    if (n < 5) throw Error(ErrorKind::Config, "sample_sizes: every n must be at least 5");
  }
  if (estimators.empty()) throw Error(ErrorKind::Config, "estimators must not be empty");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::Config, "level must be in (0, 1)");
  mcmc.validate();
}

const StudyRow* StudyReport::find(Estimator e, int n) const {
  for (const auto& r : rows) {
    if (r.estimator == e && r.n == n) return &r;
  }
  return nullptr;
}

ReplicateOutcome run_replicate(const StudyConfig& cfg, int n, int replicate) {
  const std::uint64_t data_seed =
      derive_seed(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(n)),
                  static_cast<std::uint64_t>(replicate));
  Rng rng(data_seed);
  const auto data = sample_gamma(cfg.true_params, static_cast<std::size_t>(n), rng);
  const EntropyParams truth = to_entropy_params(cfg.true_params);

  ReplicateOutcome out;
  out.estimates.resize(cfg.estimators.size());
  std::optional<SampleStats> stats;
  try {
    stats = SampleStats::from(data);
  } catch (const Error&) {
    return out;  // every estimator fails on a degenerate sample
  }

  const double tail = 0.5 * (1.0 - cfg.level);
  for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
    const Estimator est = cfg.estimators[i];
    try {
      if (const auto prior = prior_of(est)) {
        bayes::McmcConfig mc = cfg.mcmc;
        mc.seed = derive_seed(data_seed, static_cast<std::uint64_t>(est) + 1);
        if (cfg.init_at_truth) mc.init = truth;
        const auto chain = bayes::mh_within_gibbs(*prior, *stats, mc);
        out.estimates[i] = EstimateH{diagnostics::mean(chain.draws_H),
                                     diagnostics::credible_interval(chain.draws_H, tail, 1.0 - tail)};
      } else {
        MleOptions opt;
        opt.level = cfg.level;
        if (cfg.init_at_truth) opt.start = truth;
        const auto fit = fit_mle(*stats, opt);
        out.estimates[i] = EstimateH{fit.estimate.H, fit.ci_H};
      }
    } catch (const Error&) {
      out.estimates[i].reset();
    }
  }
  return out;
}

namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

std::vector<StudyRow> reduce_outcomes(const StudyConfig& cfg, int n,
                                      std::span<const ReplicateOutcome> outcomes) {
  const double true_H = entropy(cfg.true_params);
  std::vector<StudyRow> rows;
  for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
    CompensatedSum err, err2, covered, width;
    int used = 0;
    int failures = 0;
    for (const auto& o : outcomes) {
      const auto& e = o.estimates.at(i);
      if (!e) {
        ++failures;
        continue;
      }
      const double d = e->H - true_H;
      err.add(d);
      err2.add(d * d);
      covered.add(e->ci.contains(true_H) ? 1.0 : 0.0);
      width.add(e->ci.width());
      ++used;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double u = static_cast<double>(used);
    rows.push_back({cfg.estimators[i], n, cfg.true_params.alpha, cfg.true_params.beta, true_H,
                    used ? err.value() / u : nan, used ? err2.value() / u : nan,
                    used ? covered.value() / u : nan, used ? width.value() / u : nan, used,
                    failures});
  }
  return rows;
}

StudyReport run_study_serial(const StudyConfig& cfg) {
  cfg.validate();
  StudyReport report;
  for (int n : cfg.sample_sizes) {
    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(cfg.replicates));
    for (int r = 0; r < cfg.replicates; ++r) outcomes[r] = run_replicate(cfg, n, r);
    auto rows = reduce_outcomes(cfg, n, outcomes);
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  return report;
}

StudyReport run_study(const StudyConfig& cfg) {
  cfg.validate();
  StudyReport report;
  for (int n : cfg.sample_sizes) {
    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(cfg.replicates));
#pragma omp parallel for schedule(dynamic, 4)
    for (int r = 0; r < cfg.replicates; ++r) outcomes[r] = run_replicate(cfg, n, r);
    auto rows = reduce_outcomes(cfg, n, outcomes);
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  return report;
}

std::string report_to_csv(const StudyReport& report) {
  std::string out = "estimator,n,alpha,beta,true_H,bias,mse,cp,mean_width,failures\n";
  char buf[512];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d\n",
                  std::string(to_string(r.estimator)).c_str(), r.n, r.alpha, r.beta, r.true_H,
                  r.bias, r.mse, r.cp, r.mean_width, r.failures);
    out += buf;
  }
  return out;
}

}  // namespace gammaent::simlab
