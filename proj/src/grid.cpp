#include "hette/grid.hpp"

#include <algorithm>
#include <cmath>

namespace hette {

std::vector<double> quantile_grid(std::span<const double> values, std::size_t points) {
  if (values.empty() || points == 0) return {};
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (points == 1) return {sorted.front()};
  const std::size_t n = sorted.size();
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(n - 1) / static_cast<double>(points - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    grid[k] = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  }
  grid.back() = sorted.back();
  return grid;
}

std::vector<double> equal_grid(std::span<const double> values, std::size_t points) {
  if (values.empty() || points == 0) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (points == 1) return {*lo};
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k)
    grid[k] = *lo + (*hi - *lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  grid.back() = *hi;
  return grid;
}

std::vector<double> sample_point_grid(std::span<const double> values) {
  std::vector<double> grid(values.begin(), values.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> make_grid(GridKind kind, std::span<const double> values, std::size_t points) {
  switch (kind) {
    case GridKind::Quantile: return quantile_grid(values, points);
    case GridKind::Equal: return equal_grid(values, points);
    case GridKind::AllSamplePoints: return sample_point_grid(values);
  }
  return {};
}

}  // namespace hette
