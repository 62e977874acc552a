#pragma once

// Serial, unoptimised implementations of the parallel kernels. They follow
// the formulas term by term and exist to check the fast paths in tests and
// benchmarks. Not for production use: costs are O(n^2 G) or worse.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hette/continuous_test.hpp"
#include "hette/discrete_test.hpp"
#include "hette/late.hpp"
#include "hette/smoothing.hpp"

namespace hette::reference {

/// Row-major dense matrix, rows = grid points, cols = observations.
struct DenseTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// psi + phi for every (level, w) row, row index level * G + g.
DenseTable dense_influence(const InfluenceTableD& table);

/// psi + phi for every (w, x) row, row index g_w * Gx + g_x.
DenseTable dense_influence(const InfluenceTableC& table);

/// n^(-1/2) max_r |sum_i U_i T(r, i)|.
double dense_sup(const DenseTable& table, std::span<const double> multipliers);

/// Same streams as the parallel bootstrap, evaluated serially on the dense table.
std::vector<double> dense_bootstrap(const DenseTable& table, int n_bootstrap, MultiplierKind kind,
                                    std::uint64_t seed);

KernelSums kernel_sums_serial(const Sample& sample, std::span<const double> points, double h,
                              const KernelFn& kernel);

GTable g_hat_direct(const Sample& sample, const LateFit& late, const JointDensity& f_hat,
                    std::span<const double> grid_w, std::span<const double> grid_x);

/// Direct O(n^2 G) evaluation of Pi, F*, kappa and both influence cores.
InfluenceTableC influence_continuous_direct(const Sample& sample, const LateFit& late,
                                            std::span<const double> grid_w, std::span<const double> grid_x,
                                            const KernelFn& kernel, double h, double denominator_floor = 1e-10);

/// Projection form, psi + phi centred over observations, from the raw
/// double sums (kernel rows rebuilt for every term).
DenseTable dense_projection_direct(const Sample& sample, const LateFit& late, std::span<const double> grid_w,
                                   std::span<const double> grid_x, const KernelFn& kernel, double h,
                                   double denominator_floor = 1e-10);

}  // namespace hette::reference
