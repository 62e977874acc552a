#include "hette/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hette {

double gaussian_kernel(double u) {
  static const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return norm * std::exp(-0.5 * u * u);
}

const char* to_string(BandwidthRuleKind kind) {
  switch (kind) {
    case BandwidthRuleKind::MonteCarlo: return "mc";
    case BandwidthRuleKind::Empirical: return "empirical";
    case BandwidthRuleKind::Fixed: return "fixed";
  }
  return "unknown";
}

double sample_std(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

double bandwidth(const BandwidthRule& rule, double c, std::span<const double> values, std::size_t n) {
  if (rule.kind == BandwidthRuleKind::Fixed) {
    if (!(rule.fixed_h > 0.0)) throw InputError("fixed bandwidth must be positive");
    return rule.fixed_h;
  }
  if (n < 2) throw InputError("bandwidth rule needs n >= 2");
  if (!(c > 0.0)) throw InputError("bandwidth constant must be positive");
  const double sd = sample_std(values);
  if (!(sd > 0.0)) throw InputError("zero-variance generated variable");
  const double rate = rule.kind == BandwidthRuleKind::MonteCarlo ? -0.2 : -0.25;
  return c * sd * std::pow(static_cast<double>(n), rate);
}

namespace {

KernelSums make_sums(std::size_t m, bool loo) {
  KernelSums s;
  s.s0.assign(m, 0.0);
  s.sz.assign(m, 0.0);
  s.sy.assign(m, 0.0);
  s.syz.assign(m, 0.0);
  s.sd.assign(m, 0.0);
  s.sdz.assign(m, 0.0);
  s.leave_one_out = loo;
  return s;
}

// Sums at `x`, skipping row `skip` (pass n to keep all rows).
inline void accumulate(const Sample& sample, double x, double h, const KernelFn& kernel, std::size_t skip,
                       KernelSums& out, std::size_t slot) {
  double s0 = 0, sz = 0, sy = 0, syz = 0, sd = 0, sdz = 0;
  const std::size_t n = sample.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (j == skip) continue;
    const double k = kernel((sample.covariate[j] - x) / h);
    const double y = sample.outcome[j];
    const double z = sample.instrument[j];
    const double d = sample.treatment[j];
    s0 += k;
    sz += z * k;
    sy += y * k;
    syz += y * z * k;
    sd += d * k;
    sdz += d * z * k;
  }
  out.s0[slot] = s0;
  out.sz[slot] = sz;
  out.sy[slot] = sy;
  out.syz[slot] = syz;
  out.sd[slot] = sd;
  out.sdz[slot] = sdz;
}

}  // namespace

KernelSums kernel_sums(const Sample& sample, std::span<const double> points, double h, const KernelFn& kernel) {
  const std::size_t m = points.size();
  KernelSums out = make_sums(m, false);
  const std::size_t n = sample.size();
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < m; ++p) accumulate(sample, points[p], h, kernel, n, out, p);
  return out;
}

KernelSums kernel_sums_at_sample(const Sample& sample, double h, const KernelFn& kernel, bool leave_one_out) {
  const std::size_t n = sample.size();
  KernelSums out = make_sums(n, leave_one_out);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i)
    accumulate(sample, sample.covariate[i], h, kernel, leave_one_out ? i : n, out, i);
  return out;
}

JointDensity joint_density_at_sample(const KernelSums& loo_sums, std::size_t n, double h) {
  JointDensity f;
  const std::size_t m = loo_sums.size();
  const double scale = 1.0 / (static_cast<double>(n) * h);
  f.f[0].resize(m);
  f.f[1].resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    f.f[1][i] = loo_sums.sz[i] * scale;
    f.f[0][i] = (loo_sums.s0[i] - loo_sums.sz[i]) * scale;
  }
  return f;
}

std::size_t count_boundary_points(std::span<const double> points, std::span<const double> covariate, double h) {
  if (covariate.empty()) return 0;
  const auto [lo, hi] = std::minmax_element(covariate.begin(), covariate.end());
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [&](double x) { return x - *lo < h || *hi - x < h; }));
}

}  // namespace hette
