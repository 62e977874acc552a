#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hette/core.hpp"
#include "hette/kernel.hpp"

namespace hette {

/// Six kernel-weighted sums per evaluation point, with K_j = K((X_j - x)/h):
/// s0 = sum K_j, sz = sum Z_j K_j, sy = sum Y_j K_j, syz = sum Y_j Z_j K_j,
/// sd = sum D_j K_j, sdz = sum D_j Z_j K_j.
struct KernelSums {
  std::vector<double> s0, sz, sy, syz, sd, sdz;
  bool leave_one_out = false;

  std::size_t size() const { return s0.size(); }
};

/// Sums at arbitrary points over every observation.
KernelSums kernel_sums(const Sample& sample, std::span<const double> points, double h,
                       const KernelFn& kernel);

/// Sums at each sample point X_i. With leave_one_out the j = i term is
/// excluded (only that term; tied covariate values still contribute).
KernelSums kernel_sums_at_sample(const Sample& sample, double h, const KernelFn& kernel,
                                 bool leave_one_out);

/// Leave-one-out joint density estimates f(X_i, z) = (nh)^-1 sum_{j != i} K 1(Z_j = z).
struct JointDensity {
  std::vector<double> f[2];
};

JointDensity joint_density_at_sample(const KernelSums& loo_sums, std::size_t n, double h);

/// Number of points lying within h of the sample covariate range edges.
std::size_t count_boundary_points(std::span<const double> points, std::span<const double> covariate,
                                  double h);

}  // namespace hette
