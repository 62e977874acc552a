#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

#include "hette/core.hpp"

namespace hette {

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Hash of an ordered list of words. Used to derive per-rep and per-draw
/// seeds so results never depend on scheduling.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)).
double normal_cdf(double x);

/// Inverse standard normal CDF: Acklam's rational approximation followed by
/// one Halley step against normal_cdf, giving near double precision.
double normal_quantile(double p);

/// One deterministic stream: mt19937_64 with explicitly specified
/// transforms, so streams are reproducible across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Top 53 bits scaled into [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Midpoint of a 2^-53 cell, strictly inside (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() { return normal_quantile(uniform_open()); }

 private:
  std::mt19937_64 engine_;
};

/// Fills `out` with i.i.d. multipliers of mean 0, variance 1.
void draw_multipliers(MultiplierKind kind, RandomStream& stream, std::span<double> out);

}  // namespace hette
