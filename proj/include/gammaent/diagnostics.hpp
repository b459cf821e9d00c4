#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gammaent/mle.hpp"

namespace gammaent::diagnostics {

struct GewekeResult {
  double z;
  double frac_first;
  double frac_last;
  bool pass;  // |z| < 1.96
};

/// Geweke convergence z-score comparing the means of the first `frac_first`
/// and last `frac_last` of the chain. The variance of each segment mean is
/// its sample variance divided by the segment's effective sample size.
/// Throws Error(Size) below 100 draws and Error(Domain) for a segment
/// without variance.
GewekeResult geweke_z(std::span<const double> draws, double frac_first = 0.1,
                      double frac_last = 0.5);

/// Type-7 empirical quantile: linear interpolation at h = (n − 1) p + 1.
double quantile_type7(std::span<const double> draws, double p);

/// (quantile(p_lower), quantile(p_upper)) with the type-7 rule.
Interval credible_interval(std::span<const double> draws, double p_lower = 0.025,
                           double p_upper = 0.975);

/// Biased (divide-by-n) sample autocorrelations for lags 0..max_lag.
std::vector<double> autocorrelation(std::span<const double> draws, std::size_t max_lag);

/// n / τ with τ = 1 + 2 Σ ρ_k summed over adjacent lag pairs until the
/// first pair with a non-positive sum (initial positive sequence).
double effective_sample_size(std::span<const double> draws);

double mean(std::span<const double> draws);

}  // namespace gammaent::diagnostics
