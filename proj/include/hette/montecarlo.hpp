#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hette/core.hpp"

namespace hette {

/// Simulation design:
///   Y = D + X + [gamma + (1 - gamma) D] eps,  D = 1[Phi(eta) <= 0.5 Z],
///   (eps, eta) standard bivariate normal with correlation rho,
///   Z ~ Bernoulli(p_z), X uniform on {1,2,3,4} or [0,1].
/// gamma = 1 is the homogeneous-effect null.
struct DgpSpec {
  double gamma = 1.0;
  double rho = 0.7;
  double p_z = 0.5;
  std::size_t n = 1000;
  CovariateKind covariate_kind = CovariateKind::Discrete;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic given spec.seed. Each row draws, in order: X, Z, eps, eta.
Sample simulate(const DgpSpec& spec);

struct RejectionSweep {
  CovariateKind covariate_kind = CovariateKind::Discrete;
  std::vector<double> gammas;
  std::vector<double> p_values;
  std::vector<std::size_t> sample_sizes;
  std::vector<double> bandwidth_constants;
  double rho = 0.7;

  void validate() const;
};

/// Sweep of the published experiments: table 1 (discrete) or 2 (continuous).
RejectionSweep published_sweep(int table);

struct RejectionCell {
  double gamma = 1.0;
  double p_z = 0.5;
  std::size_t n = 0;
  double c = 1.0;
  int reps = 0;
  int rejections = 0;
  int failures = 0;
  std::vector<double> p_values;  // one per successful rep, in rep order

  /// Rejections over successful reps.
  double frequency() const;
};

struct RejectionGrid {
  CovariateKind covariate_kind = CovariateKind::Discrete;
  int n_reps = 0;
  int n_bootstrap = 0;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  std::vector<RejectionCell> cells;  // gamma-major, then p, n, c (sweep order)
  Diagnostics diagnostics;

  const RejectionCell& find(double gamma, double p_z, std::size_t n, double c) const;
};

/// Runs n_reps simulate -> test -> decision replicates per design point.
/// Data for rep r of design (gamma, p, n) come from
/// derive_seed({master_seed, design index, r}); all bandwidth constants of
/// that design reuse the same data and multipliers. Reps run in parallel;
/// the grid is identical for any thread count. Per-rep failures are
/// counted, never thrown.
RejectionGrid rejection_table(const RejectionSweep& sweep, const TestConfig& config_template, int n_reps,
                              std::uint64_t master_seed);

std::string rejection_grid_csv(const RejectionGrid& grid);

/// Aligned text layout: one panel per gamma, rows p x n, columns c.
std::string rejection_grid_text(const RejectionGrid& grid);

}  // namespace hette
