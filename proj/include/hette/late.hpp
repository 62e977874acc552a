#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hette/core.hpp"
#include "hette/kernel.hpp"

namespace hette {

/// Conditional LATE fit and the generated variable W = Y + (1 - D) delta(X).
///
/// delta_at_sample is the leave-one-out estimate at each X_i. Propensities
/// and conditional means are full-sample fits evaluated at X_i: cell
/// frequencies and cell means in discrete mode, Nadaraya-Watson ratios in
/// continuous mode.
struct LateFit {
  TestMode mode = TestMode::Discrete;
  std::vector<double> delta_at_sample;
  std::vector<double> w_hat;
  std::array<std::vector<double>, 2> propensity;   // p(X_i, z)
  std::array<std::vector<double>, 2> cond_mean_y;  // E(Y | X_i, Z = z)
  std::vector<double> cond_mean_w;                 // E(W | X_i), Z pooled
  std::array<std::vector<double>, 2> cond_mean_w_z;
  std::vector<std::size_t> floored_points;
  std::vector<std::size_t> clipped_points;
  double bandwidth = 0.0;                          // continuous mode only
  Diagnostics diagnostics;
};

struct LateOptions {
  bool leave_one_out = true;
  double denominator_floor = 1e-10;
  double max_floored_fraction = 0.05;
};

/// Cell-wise covariance ratio Cov(Y,Z|x)/Cov(D,Z|x) written with raw
/// indicator sums. Throws NumericalError("instrument irrelevant in cell x")
/// when the (leave-one-out) first stage of a cell vanishes.
LateFit late_discrete(const Sample& sample, const LateOptions& options = {});

/// Kernel-weighted covariance ratio (S_YZ S_0 - S_Y S_Z)/(S_DZ S_0 - S_D S_Z)
/// from leave-one-out kernel sums. Denominators below the floor are floored
/// and recorded; more than max_floored_fraction of them throws
/// NumericalError("weak first stage").
LateFit late_continuous(const Sample& sample, double h, const KernelFn& kernel,
                        const LateOptions& options = {});

/// Full-sample kernel LATE at arbitrary points (no exclusion).
std::vector<double> late_continuous_at(const Sample& sample, std::span<const double> points, double h,
                                       const KernelFn& kernel, double denominator_floor = 1e-10);

/// Textbook Wald estimator (ybar_1 - ybar_0)/(dbar_1 - dbar_0) over the whole sample.
double wald_estimate(const Sample& sample);

struct ComplierCdf {
  std::vector<double> t_grid;
  std::vector<double> raw;        // plug-in ratio, may leave [0, 1]
  std::vector<double> monotone;   // isotonic fit clipped to [0, 1]
  double max_decrease = 0.0;      // largest drop of `raw` along t
};

/// Complier distribution of the potential outcome under treatment d at a
/// discrete covariate level x:
///   [P(Y<=t,D=d|x,1) - P(Y<=t,D=d|x,0)] / [P(D=d|x,1) - P(D=d|x,0)].
/// Throws NumericalError("no compliers detected at x") on a zero denominator.
ComplierCdf complier_cdf(const Sample& sample, int d, double x, std::span<const double> t_grid);

/// Pool-adjacent-violators fit of a non-decreasing sequence (equal weights).
std::vector<double> isotonic_fit(std::span<const double> values);

}  // namespace hette
