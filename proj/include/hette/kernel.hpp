#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace hette {

/// Standard normal density, (2*pi)^(-1/2) exp(-u^2/2).
double gaussian_kernel(double u);

/// A symmetric, bounded kernel integrating to one. Held as a plain
/// function pointer so the O(n^2) loops avoid std::function dispatch.
struct KernelFn {
  std::string name;
  double (*evaluate)(double) = nullptr;

  double operator()(double u) const { return evaluate(u); }
};

inline KernelFn gaussian() { return KernelFn{"gaussian", &gaussian_kernel}; }

enum class BandwidthRuleKind { MonteCarlo, Empirical, Fixed };

const char* to_string(BandwidthRuleKind kind);

struct BandwidthRule {
  BandwidthRuleKind kind = BandwidthRuleKind::MonteCarlo;
  double fixed_h = 0.0;

  // c * std * n^(-1/5)
  static BandwidthRule monte_carlo() { return {BandwidthRuleKind::MonteCarlo, 0.0}; }
  // c * std * n^(-1/4)
  static BandwidthRule empirical() { return {BandwidthRuleKind::Empirical, 0.0}; }
  static BandwidthRule fixed(double h) { return {BandwidthRuleKind::Fixed, h}; }
};

/// Rule-of-thumb bandwidth from the sample standard deviation (n - 1
/// denominator) of `values`. Fixed rules return their value untouched.
/// Throws InputError on n < 2, c <= 0 or zero-variance input.
double bandwidth(const BandwidthRule& rule, double c, std::span<const double> values, std::size_t n);

double sample_std(std::span<const double> values);

}  // namespace hette
