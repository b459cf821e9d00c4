#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace gammaent {

/// Derives an independent 64-bit seed from a parent seed and a stream index
/// (SplitMix64 finalizer over the pair). Used to give every replicate and
/// chain its own stream, independent of scheduling order.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

/// Random source for the samplers. Variates are generated here rather than
/// with <random> distributions so that draws are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Gamma(shape, rate 1) by Marsaglia–Tsang, with the u^(1/shape) boost
  /// for shape < 1. May underflow to 0 for very small shapes.
  double gamma(double shape);
  double gamma(double shape, double rate) { return gamma(shape) / rate; }
  /// log of a Gamma(shape, rate 1) variate, computed without underflow.
  double log_gamma_variate(double shape);

 private:
  double gamma_shape_at_least_one(double shape);

  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace gammaent
