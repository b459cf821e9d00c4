#include "gammaent/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gammaent/error.hpp"

namespace gammaent::diagnostics {
namespace {

double centered_sum_squares(std::span<const double> x, double m) {
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss;
}

double lag_product(std::span<const double> x, double m, std::size_t lag) {
  double acc = 0.0;
  for (std::size_t i = 0; i + lag < x.size(); ++i) acc += (x[i] - m) * (x[i + lag] - m);
  return acc;
}

// Integrated autocorrelation time by the initial positive sequence rule.
// Requires a segment with positive variance.
double autocorrelation_time(std::span<const double> x) {
  const double m = mean(x);
  const double ss = centered_sum_squares(x, m);
  if (!(ss > 0.0)) throw Error(ErrorKind::Domain, "draws have zero variance");
  const std::size_t n = x.size();
  double tau = -1.0;
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    const double pair = (lag_product(x, m, k) + lag_product(x, m, k + 1)) / ss;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  // A single positive pair can push τ below its floor on short segments.
  return std::max(tau, 1.0 / static_cast<double>(n));
}

}  // namespace

double mean(std::span<const double> draws) {
  if (draws.empty()) throw Error(ErrorKind::Size, "mean of empty sequence");
  double acc = 0.0;
  for (double v : draws) acc += v;
  return acc / static_cast<double>(draws.size());
}

GewekeResult geweke_z(std::span<const double> draws, double frac_first, double frac_last) {
  if (draws.size() < 100) {
    throw Error(ErrorKind::Size, "geweke_z needs at least 100 draws, got " + std::to_string(draws.size()));
  }
  if (!(frac_first > 0.0 && frac_last > 0.0 && frac_first + frac_last <= 1.0)) {
    throw Error(ErrorKind::Domain, "geweke_z: window fractions must be positive and sum to at most 1");
  }
  const auto n = draws.size();
  const auto na = static_cast<std::size_t>(std::floor(frac_first * static_cast<double>(n)));
  const auto nb = static_cast<std::size_t>(std::floor(frac_last * static_cast<double>(n)));
  const auto a = draws.first(na);
  const auto b = draws.last(nb);

  auto mean_variance = [](std::span<const double> seg) {
    const double m = mean(seg);
    const double var = centered_sum_squares(seg, m) / static_cast<double>(seg.size());
    return var * autocorrelation_time(seg) / static_cast<double>(seg.size());
  };
  const double z = (mean(a) - mean(b)) / std::sqrt(mean_variance(a) + mean_variance(b));
  return {z, frac_first, frac_last, std::fabs(z) < 1.96};
}

double quantile_type7(std::span<const double> draws, double p) {
  if (draws.empty()) throw Error(ErrorKind::Size, "quantile of empty sequence");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Domain, "quantile probability must be in [0, 1]");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * p;  // zero-based (n−1)p
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Interval credible_interval(std::span<const double> draws, double p_lower, double p_upper) {
  return {quantile_type7(draws, p_lower), quantile_type7(draws, p_upper)};
}

std::vector<double> autocorrelation(std::span<const double> draws, std::size_t max_lag) {
  if (draws.size() <= max_lag) {
    throw Error(ErrorKind::Size, "autocorrelation: need more draws than max_lag");
  }
  const double m = mean(draws);
  const double ss = centered_sum_squares(draws, m);
  if (!(ss > 0.0)) throw Error(ErrorKind::Domain, "autocorrelation: draws have zero variance");
  std::vector<double> acf(max_lag + 1);
  acf[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) acf[k] = lag_product(draws, m, k) / ss;
  return acf;
}

double effective_sample_size(std::span<const double> draws) {
  if (draws.size() < 100) {
    throw Error(ErrorKind::Size, "effective_sample_size needs at least 100 draws");
  }
  return static_cast<double>(draws.size()) / autocorrelation_time(draws);
}

}  // namespace gammaent::diagnostics
