#include "hette/late.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hette/smoothing.hpp"

namespace hette {

namespace {

std::string describe(double x) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << x;
  return os.str();
}

struct CellSums {
  double s0 = 0, sz = 0, sy = 0, syz = 0, sd = 0, sdz = 0;

  void add(double y, double d, double z, double sign = 1.0) {
    s0 += sign;
    sz += sign * z;
    sy += sign * y;
    syz += sign * y * z;
    sd += sign * d;
    sdz += sign * d * z;
  }
};

}  // namespace

LateFit late_discrete(const Sample& sample, const LateOptions& options) {
  const std::size_t n = sample.size();
  const CellIndex cells = build_cells(sample);
  const std::size_t levels = cells.num_levels();

  std::vector<CellSums> sums(levels);
  std::vector<double> sum_y[2] = {std::vector<double>(levels, 0.0), std::vector<double>(levels, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = cells.cell_of[i];
    sums[c].add(sample.outcome[i], sample.treatment[i], sample.instrument[i]);
    sum_y[sample.instrument[i]][c] += sample.outcome[i];
  }

  LateFit fit;
  fit.mode = TestMode::Discrete;
  fit.delta_at_sample.resize(n);
  fit.w_hat.resize(n);

  const auto ratio = [&](const CellSums& s, double level) {
    const double den = s.sdz * s.s0 - s.sd * s.sz;
    if (s.s0 <= 0.0 || !(std::abs(den) / (s.s0 * s.s0) >= options.denominator_floor))
      throw NumericalError("instrument irrelevant in cell x=" + describe(level));
    return (s.syz * s.s0 - s.sy * s.sz) / den;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = cells.cell_of[i];
    CellSums s = sums[c];
    if (options.leave_one_out) s.add(sample.outcome[i], sample.treatment[i], sample.instrument[i], -1.0);
    const double delta = ratio(s, cells.levels[c]);
    fit.delta_at_sample[i] = delta;
    fit.w_hat[i] = sample.outcome[i] + (1 - sample.treatment[i]) * delta;
  }

  // Full-sample cell quantities.
  std::vector<double> sum_w[2] = {std::vector<double>(levels, 0.0), std::vector<double>(levels, 0.0)};
  for (std::size_t i = 0; i < n; ++i) sum_w[sample.instrument[i]][cells.cell_of[i]] += fit.w_hat[i];

  for (int z = 0; z < 2; ++z) {
    fit.propensity[z].resize(n);
    fit.cond_mean_y[z].resize(n);
    fit.cond_mean_w_z[z].resize(n);
  }
  fit.cond_mean_w.resize(n);
  int positive = 0, negative = 0;
  std::size_t small_cells = 0;
  for (std::size_t c = 0; c < levels; ++c) {
    const double p1 = static_cast<double>(cells.treated[1][c]) / static_cast<double>(cells.count[1][c]);
    const double p0 = static_cast<double>(cells.treated[0][c]) / static_cast<double>(cells.count[0][c]);
    (p1 > p0 ? positive : negative) += 1;
    if (cells.count[0][c] < 5 || cells.count[1][c] < 5) ++small_cells;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = cells.cell_of[i];
    for (int z = 0; z < 2; ++z) {
      const auto cnt = static_cast<double>(cells.count[z][c]);
      fit.propensity[z][i] = cnt > 0 ? static_cast<double>(cells.treated[z][c]) / cnt : 0.0;
      fit.cond_mean_y[z][i] = cnt > 0 ? sum_y[z][c] / cnt : 0.0;
      fit.cond_mean_w_z[z][i] = cnt > 0 ? sum_w[z][c] / cnt : 0.0;
    }
    const auto total = static_cast<double>(cells.count[0][c] + cells.count[1][c]);
    fit.cond_mean_w[i] = (sum_w[0][c] + sum_w[1][c]) / total;
  }

  if (positive > 0 && negative > 0)
    fit.diagnostics["first_stage_sign_flip"] =
        std::to_string(negative) + " of " + std::to_string(levels) + " cells have p(x,1) < p(x,0)";
  if (small_cells > 0)
    fit.diagnostics["small_cells"] = std::to_string(small_cells) + " covariate cells have fewer than 5 rows for some z";
  return fit;
}

LateFit late_continuous(const Sample& sample, double h, const KernelFn& kernel, const LateOptions& options) {
  if (!(h > 0.0)) throw InputError("bandwidth must be positive");
  const std::size_t n = sample.size();
  const KernelSums loo = kernel_sums_at_sample(sample, h, kernel, options.leave_one_out);

  LateFit fit;
  fit.mode = TestMode::Continuous;
  fit.bandwidth = h;
  fit.delta_at_sample.resize(n);
  fit.w_hat.resize(n);

  std::size_t negative = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s0 = loo.s0[i];
    const double num = loo.syz[i] * s0 - loo.sy[i] * loo.sz[i];
    double den = loo.sdz[i] * s0 - loo.sd[i] * loo.sz[i];
    double delta = 0.0;
    if (!(s0 > 0.0)) {
      fit.floored_points.push_back(i);
    } else {
      if (den < 0.0) ++negative;
      if (!(std::abs(den) / (s0 * s0) >= options.denominator_floor)) {
        den = std::copysign(options.denominator_floor * s0 * s0, den);
        fit.floored_points.push_back(i);
      }
      delta = num / den;
    }
    fit.delta_at_sample[i] = delta;
    fit.w_hat[i] = sample.outcome[i] + (1 - sample.treatment[i]) * delta;
  }

  const auto floored = fit.floored_points.size();
  if (static_cast<double>(floored) > options.max_floored_fraction * static_cast<double>(n))
    throw NumericalError("weak first stage: " + std::to_string(floored) + " of " + std::to_string(n) +
                         " first-stage denominators fell below the floor");
  if (floored > 0)
    fit.diagnostics["floored_denominators"] = std::to_string(floored) + " first-stage denominators floored";
  if (negative > 0 && negative < n)
    fit.diagnostics["first_stage_sign_flip"] =
        std::to_string(negative) + " of " + std::to_string(n) + " points have a negative first stage";

  // Full-sample Nadaraya-Watson fits at the sample points. When the sums
  // above left the own term out, add it back.
  const double k0 = kernel(0.0);
  const bool add_self = options.leave_one_out;
  for (int z = 0; z < 2; ++z) {
    fit.propensity[z].resize(n);
    fit.cond_mean_y[z].resize(n);
    fit.cond_mean_w_z[z].resize(n);
  }
  fit.cond_mean_w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s0 = loo.s0[i], sz = loo.sz[i], sy = loo.sy[i], syz = loo.syz[i], sd = loo.sd[i], sdz = loo.sdz[i];
    if (add_self) {
      const double y = sample.outcome[i], d = sample.treatment[i], z = sample.instrument[i];
      s0 += k0;
      sz += k0 * z;
      sy += k0 * y;
      syz += k0 * y * z;
      sd += k0 * d;
      sdz += k0 * d * z;
    }
    const double n1 = sz, n0 = s0 - sz;
    double p1 = n1 > 0.0 ? sdz / n1 : 0.0;
    double p0 = n0 > 0.0 ? (sd - sdz) / n0 : 0.0;
    if (p1 < 0.0 || p1 > 1.0 || p0 < 0.0 || p0 > 1.0) fit.clipped_points.push_back(i);
    fit.propensity[1][i] = std::clamp(p1, 0.0, 1.0);
    fit.propensity[0][i] = std::clamp(p0, 0.0, 1.0);
    fit.cond_mean_y[1][i] = n1 > 0.0 ? syz / n1 : 0.0;
    fit.cond_mean_y[0][i] = n0 > 0.0 ? (sy - syz) / n0 : 0.0;
  }
  if (!fit.clipped_points.empty())
    fit.diagnostics["clipped_propensities"] =
        std::to_string(fit.clipped_points.size()) + " propensity estimates clipped to [0,1]";

  const auto& x = sample.covariate;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    double k_all = 0, kw_all = 0, k_z1 = 0, kw_z1 = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double k = kernel((x[j] - x[i]) / h);
      k_all += k;
      kw_all += k * fit.w_hat[j];
      if (sample.instrument[j] == 1) {
        k_z1 += k;
        kw_z1 += k * fit.w_hat[j];
      }
    }
    fit.cond_mean_w[i] = k_all > 0.0 ? kw_all / k_all : fit.w_hat[i];
    fit.cond_mean_w_z[1][i] = k_z1 > 0.0 ? kw_z1 / k_z1 : 0.0;
    fit.cond_mean_w_z[0][i] = k_all - k_z1 > 0.0 ? (kw_all - kw_z1) / (k_all - k_z1) : 0.0;
  }
  return fit;
}

std::vector<double> late_continuous_at(const Sample& sample, std::span<const double> points, double h,
                                       const KernelFn& kernel, double denominator_floor) {
  const KernelSums s = kernel_sums(sample, points, h, kernel);
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double s0 = s.s0[p];
    if (!(s0 > 0.0)) continue;
    double den = s.sdz[p] * s0 - s.sd[p] * s.sz[p];
    if (!(std::abs(den) / (s0 * s0) >= denominator_floor)) den = std::copysign(denominator_floor * s0 * s0, den);
    out[p] = (s.syz[p] * s0 - s.sy[p] * s.sz[p]) / den;
  }
  return out;
}

double wald_estimate(const Sample& sample) {
  double y[2] = {0, 0}, d[2] = {0, 0}, m[2] = {0, 0};
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const int z = sample.instrument[i];
    y[z] += sample.outcome[i];
    d[z] += sample.treatment[i];
    m[z] += 1.0;
  }
  const double den = d[1] / m[1] - d[0] / m[0];
  if (den == 0.0) throw NumericalError("instrument irrelevant: zero first stage");
  return (y[1] / m[1] - y[0] / m[0]) / den;
}

std::vector<double> isotonic_fit(std::span<const double> values) {
  // Blocks of (mean, size); merge while a block's mean exceeds its successor's.
  std::vector<double> mean;
  std::vector<std::size_t> size;
  for (double v : values) {
    mean.push_back(v);
    size.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
      const std::size_t k = mean.size() - 1;
      const double total = mean[k - 1] * static_cast<double>(size[k - 1]) + mean[k] * static_cast<double>(size[k]);
      size[k - 1] += size[k];
      mean[k - 1] = total / static_cast<double>(size[k - 1]);
      mean.pop_back();
      size.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t b = 0; b < mean.size(); ++b) out.insert(out.end(), size[b], mean[b]);
  return out;
}

ComplierCdf complier_cdf(const Sample& sample, int d, double x, std::span<const double> t_grid) {
  if (d != 0 && d != 1) throw InputError("treatment level must be 0 or 1");
  std::vector<double> y_sel[2];
  double count[2] = {0, 0};
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample.covariate[i] != x) continue;
    const int z = sample.instrument[i];
    count[z] += 1.0;
    if (sample.treatment[i] == d) y_sel[z].push_back(sample.outcome[i]);
  }
  if (count[0] == 0.0 || count[1] == 0.0) throw InputError("empty (x,z) cell at x=" + describe(x));
  const double den = static_cast<double>(y_sel[1].size()) / count[1] - static_cast<double>(y_sel[0].size()) / count[0];
  if (den == 0.0) throw NumericalError("no compliers detected at x=" + describe(x));
  for (auto& v : y_sel) std::sort(v.begin(), v.end());

  ComplierCdf out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  out.raw.reserve(t_grid.size());
  for (double t : t_grid) {
    double frac[2];
    for (int z = 0; z < 2; ++z)
      frac[z] = static_cast<double>(std::upper_bound(y_sel[z].begin(), y_sel[z].end(), t) - y_sel[z].begin()) /
                count[z];
    out.raw.push_back((frac[1] - frac[0]) / den);
  }
  out.monotone = isotonic_fit(out.raw);
  for (double& v : out.monotone) v = std::clamp(v, 0.0, 1.0);
  double running_max = -std::numeric_limits<double>::infinity();
  for (double v : out.raw) {
    running_max = std::max(running_max, v);
    out.max_decrease = std::max(out.max_decrease, running_max - v);
  }
  return out;
}

}  // namespace hette
