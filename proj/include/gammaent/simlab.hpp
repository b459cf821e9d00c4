#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gammaent/bayes.hpp"
#include "gammaent/gamma_model.hpp"
#include "gammaent/mle.hpp"
#include "gammaent/random.hpp"

namespace gammaent::simlab {

enum class Estimator { MLE, Jeffreys, ReferenceBeta, ReferenceAlpha, Matching };

inline constexpr std::array<Estimator, 5> kAllEstimators{
    Estimator::MLE, Estimator::Jeffreys, Estimator::ReferenceBeta, Estimator::ReferenceAlpha,
    Estimator::Matching};

/// mle, jeffreys, ref-beta, ref-alpha, matching.
std::string_view to_string(Estimator e);
std::optional<Estimator> parse_estimator(std::string_view name);
std::optional<bayes::PriorKind> prior_of(Estimator e);

/// n i.i.d. draws from Gamma(α, rate β).
std::vector<double> sample_gamma(const GammaParams& p, std::size_t n, Rng& rng);

/// Gamma CDF with rate parametrization.
double gamma_cdf(const GammaParams& p, double x);

/// One-sample Kolmogorov–Smirnov statistic D against Gamma(α, rate β).
double ks_statistic(std::span<const double> data, const GammaParams& p);

/// Burn-in 500 followed by 5000 iterations thinned by 5 (1001 retained draws).
inline bayes::McmcConfig study_mcmc_defaults() {
  bayes::McmcConfig cfg;
  cfg.R = 5500;
  cfg.burn = 500;
  cfg.jump = 5;
  return cfg;
}

struct StudyConfig {
  GammaParams true_params{4.0, 2.0};
  std::vector<int> sample_sizes{20};
  int replicates = 1000;
  std::vector<Estimator> estimators{kAllEstimators.begin(), kAllEstimators.end()};
  bayes::McmcConfig mcmc = study_mcmc_defaults();
  double level = 0.95;
  std::uint64_t master_seed = 20210101;
  /// Start Newton and the chains at the generating parameters; otherwise
  /// at the closed-form initializer.
  bool init_at_truth = true;

  /// Throws Error(Config) on N < 1, any n < 5, level outside (0, 1), an
  /// empty estimator list, or an invalid MCMC configuration.
  void validate() const;
};

struct StudyRow {
  Estimator estimator;
  int n;
  double alpha;
  double beta;
  double true_H;
  double bias;
  double mse;
  double cp;
  double mean_width;
  int used;      // replicates contributing to the row
  int failures;  // replicates dropped after an estimator error
};

struct StudyReport {
  std::vector<StudyRow> rows;  // ordered by n, then by estimator order in the config

  const StudyRow* find(Estimator e, int n) const;
};

/// Point estimate and interval of H from one estimator on one sample.
struct EstimateH {
  double H;
  Interval ci;
};

/// Everything computed for one replicate: one slot per configured
/// estimator, empty where the estimator failed.
struct ReplicateOutcome {
  std::vector<std::optional<EstimateH>> estimates;
};

/// Deterministic per-replicate kernel. Its random streams depend only on
/// (master_seed, n, replicate), never on scheduling.
ReplicateOutcome run_replicate(const StudyConfig& cfg, int n, int replicate);

/// Reference implementation: replicates evaluated in order on one thread.
StudyReport run_study_serial(const StudyConfig& cfg);

/// Replicates distributed over OpenMP threads. Bit-identical to
/// run_study_serial for every thread count.
StudyReport run_study(const StudyConfig& cfg);

/// Folds replicate outcomes (indexed by replicate) into report rows.
std::vector<StudyRow> reduce_outcomes(const StudyConfig& cfg, int n,
                                      std::span<const ReplicateOutcome> outcomes);

std::string report_to_csv(const StudyReport& report);

}  // namespace gammaent::simlab
