#pragma once

#include <cstdint>
#include <random>

namespace qdc {

/// Deterministic random stream. All variates are derived from the raw
/// mt19937_64 output with fixed algorithms (no std:: distributions), so a
/// given seed reproduces bit-identical sequences on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Exponential variate with the given rate (mean 1/rate).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// Standard normal via Box-Muller (second value cached).
  double gaussian();

  /// Poisson count: Knuth multiplication for small means, Hormann's
  /// transformed rejection (PTRS) otherwise.
  std::uint64_t poisson(double mean);

  /// Number of failures before the first success at probability p.
  std::uint64_t geometric_failures(double p);

 private:
  std::mt19937_64 gen_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace qdc
