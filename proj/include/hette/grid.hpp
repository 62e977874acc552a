#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hette/core.hpp"

namespace hette {

/// `points` empirical quantiles (linear interpolation between order
/// statistics) at probabilities k/(points-1); first is min, last is max.
std::vector<double> quantile_grid(std::span<const double> values, std::size_t points);

/// `points` equally spaced values on [min, max].
std::vector<double> equal_grid(std::span<const double> values, std::size_t points);

/// Sorted distinct values. ECDF differences only jump here, so the sup
/// over this grid is the exact sup over the real line.
std::vector<double> sample_point_grid(std::span<const double> values);

std::vector<double> make_grid(GridKind kind, std::span<const double> values, std::size_t points);

}  // namespace hette
