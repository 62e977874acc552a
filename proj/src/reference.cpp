#include "hette/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hette/bootstrap.hpp"

namespace hette::reference {

DenseTable dense_influence(const InfluenceTableD& table) {
  DenseTable d;
  d.rows = table.num_levels() * table.num_grid();
  d.cols = table.n;
  d.values.assign(d.rows * d.cols, 0.0);
  for (std::size_t c = 0; c < table.num_levels(); ++c)
    for (std::size_t g = 0; g < table.num_grid(); ++g)
      for (std::size_t i = 0; i < table.n; ++i)
        d.values[(c * table.num_grid() + g) * d.cols + i] = table.psi(g, c, i) + table.phi(g, c, i);
  return d;
}

DenseTable dense_influence(const InfluenceTableC& table) {
  DenseTable d;
  d.rows = table.num_w() * table.num_x();
  d.cols = table.n;
  d.values.assign(d.rows * d.cols, 0.0);
  for (std::size_t gw = 0; gw < table.num_w(); ++gw)
    for (std::size_t gx = 0; gx < table.num_x(); ++gx)
      for (std::size_t i = 0; i < table.n; ++i)
        d.values[(gw * table.num_x() + gx) * d.cols + i] = table.psi(gw, gx, i) + table.phi(gw, gx, i);
  return d;
}

double dense_sup(const DenseTable& table, std::span<const double> multipliers) {
  double best = 0.0;
  for (std::size_t r = 0; r < table.rows; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < table.cols; ++i) s += multipliers[i] * table.at(r, i);
    best = std::max(best, std::abs(s));
  }
  return best / std::sqrt(static_cast<double>(table.cols));
}

std::vector<double> dense_bootstrap(const DenseTable& table, int n_bootstrap, MultiplierKind kind,
                                    std::uint64_t seed) {
  std::vector<double> draws(static_cast<std::size_t>(n_bootstrap));
  std::vector<double> u(table.cols);
  for (int b = 0; b < n_bootstrap; ++b) {
    RandomStream stream(multiplier_seed(seed, static_cast<std::size_t>(b)));
    draw_multipliers(kind, stream, u);
    draws[static_cast<std::size_t>(b)] = dense_sup(table, u);
  }
  return draws;
}

KernelSums kernel_sums_serial(const Sample& sample, std::span<const double> points, double h,
                              const KernelFn& kernel) {
  KernelSums s;
  const std::size_t m = points.size();
  for (auto* v : {&s.s0, &s.sz, &s.sy, &s.syz, &s.sd, &s.sdz}) v->assign(m, 0.0);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t j = 0; j < sample.size(); ++j) {
      const double k = kernel((sample.covariate[j] - points[p]) / h);
      const double y = sample.outcome[j], z = sample.instrument[j], d = sample.treatment[j];
      s.s0[p] += k;
      s.sz[p] += z * k;
      s.sy[p] += y * k;
      s.syz[p] += y * z * k;
      s.sd[p] += d * k;
      s.sdz[p] += d * z * k;
    }
  return s;
}

GTable g_hat_direct(const Sample& sample, const LateFit& late, const JointDensity& f_hat,
                    std::span<const double> grid_w, std::span<const double> grid_x) {
  GTable t;
  t.n = sample.size();
  t.grid_w.assign(grid_w.begin(), grid_w.end());
  t.grid_x.assign(grid_x.begin(), grid_x.end());
  for (int z = 0; z < 2; ++z) {
    t.values[z].assign(grid_w.size() * grid_x.size(), 0.0);
    for (std::size_t gw = 0; gw < grid_w.size(); ++gw)
      for (std::size_t gx = 0; gx < grid_x.size(); ++gx) {
        double s = 0.0;
        for (std::size_t i = 0; i < t.n; ++i)
          if (sample.covariate[i] <= grid_x[gx] && sample.instrument[i] == z)
            s += lambda_fn(late.w_hat[i] - grid_w[gw]) * f_hat.f[1 - z][i];
        t.values[z][gw * grid_x.size() + gx] = s / static_cast<double>(t.n);
      }
  }
  return t;
}

InfluenceTableC influence_continuous_direct(const Sample& sample, const LateFit& late,
                                            std::span<const double> grid_w, std::span<const double> grid_x,
                                            const KernelFn& kernel, double h, double denominator_floor) {
  const std::size_t n = sample.size();
  const std::size_t Gw = grid_w.size(), Gx = grid_x.size();
  InfluenceTableC t;
  t.form = InfluenceForm::PlugIn;
  t.n = n;
  t.grid_w.assign(grid_w.begin(), grid_w.end());
  t.grid_x.assign(grid_x.begin(), grid_x.end());
  t.covariate = sample.covariate;
  t.z_of = sample.instrument;
  t.d_of = sample.treatment;
  t.w_hat = late.w_hat;
  t.bandwidth = h;
  t.kernel = kernel;
  t.cond_mean_w = late.cond_mean_w;
  t.propensity[0] = late.propensity[0];
  t.propensity[1] = late.propensity[1];

  for (int z = 0; z < 2; ++z) t.f_hat[z].assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) t.f_hat[sample.instrument[j]][i] += kernel((sample.covariate[j] - sample.covariate[i]) / h);
  for (int z = 0; z < 2; ++z)
    for (double& v : t.f_hat[z]) v /= static_cast<double>(n) * h;

  t.weight.resize(n);
  t.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.weight[i] = sample.instrument[i] == 1 ? t.f_hat[0][i] : -t.f_hat[1][i];
    t.residual[i] = late.w_hat[i] - late.cond_mean_w[i];
  }

  t.psi_core.assign(n * Gw, 0.0);
  t.phi_core.assign(n * Gw, 0.0);
  t.kappa.assign(n * Gw, 0.0);
  t.primitive.assign(n * Gw, 0.0);
  t.sub_cdf[0].assign(n * Gw, 0.0);
  t.sub_cdf[1].assign(n * Gw, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double den = late.propensity[1][i] - late.propensity[0][i];
    if (!(std::abs(den) >= denominator_floor)) den = std::copysign(denominator_floor, den);
    for (std::size_t g = 0; g < Gw; ++g) {
      const double w = grid_w[g];
      double k_all = 0, k_lambda = 0, k_z[2] = {0, 0}, k_sub[2] = {0, 0};
      for (std::size_t j = 0; j < n; ++j) {
        const double k = kernel((sample.covariate[j] - sample.covariate[i]) / h);
        const int z = sample.instrument[j];
        k_all += k;
        k_lambda += k * lambda_fn(late.w_hat[j] - w);
        k_z[z] += k;
        if (sample.treatment[j] == 0 && late.w_hat[j] <= w) k_sub[z] += k;
      }
      const double pi = k_lambda / k_all;
      const double f0 = k_z[0] > 0 ? k_sub[0] / k_z[0] : 0.0;
      const double f1 = k_z[1] > 0 ? k_sub[1] / k_z[1] : 0.0;
      const double kap = -(f1 - f0) / den;
      const std::size_t idx = i * Gw + g;
      t.primitive[idx] = pi;
      t.sub_cdf[0][idx] = f0;
      t.sub_cdf[1][idx] = f1;
      t.kappa[idx] = kap;
      t.psi_core[idx] = (lambda_fn(late.w_hat[i] - w) - pi) * t.weight[i];
      t.phi_core[idx] = kap * (late.w_hat[i] - late.cond_mean_w[i]) * t.weight[i];
    }
  }

  t.order_by_x.resize(n);
  std::iota(t.order_by_x.begin(), t.order_by_x.end(), std::size_t{0});
  std::stable_sort(t.order_by_x.begin(), t.order_by_x.end(),
                   [&](std::size_t a, std::size_t b) { return t.covariate[a] < t.covariate[b]; });
  t.x_cut.assign(Gx, 0);
  for (std::size_t gx = 0; gx < Gx; ++gx)
    for (std::size_t i = 0; i < n; ++i)
      if (t.covariate[i] <= grid_x[gx]) ++t.x_cut[gx];

  for (int z = 0; z < 2; ++z) {
    t.psi_center[z].assign(Gw * Gx, 0.0);
    t.phi_center[z].assign(Gw * Gx, 0.0);
    for (std::size_t gw = 0; gw < Gw; ++gw)
      for (std::size_t gx = 0; gx < Gx; ++gx) {
        double sp = 0, sf = 0, cnt = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (t.covariate[i] > grid_x[gx] || t.z_of[i] != z) continue;
          sp += t.psi_core[i * Gw + gw];
          sf += t.phi_core[i * Gw + gw];
          cnt += 1;
        }
        t.psi_center[z][gw * Gx + gx] = cnt > 0 ? sp / cnt : 0.0;
        t.phi_center[z][gw * Gx + gx] = cnt > 0 ? sf / cnt : 0.0;
      }
  }
  return t;
}

DenseTable dense_projection_direct(const Sample& sample, const LateFit& late, std::span<const double> grid_w,
                                   std::span<const double> grid_x, const KernelFn& kernel, double h,
                                   double denominator_floor) {
  const std::size_t n = sample.size();
  const std::size_t Gw = grid_w.size(), Gx = grid_x.size();
  const double nh = static_cast<double>(n) * h;
  auto kt = [&](std::size_t i, std::size_t k) {
    return i == k ? 0.0 : kernel((sample.covariate[k] - sample.covariate[i]) / h) / nh;
  };

  std::vector<double> s(n), zbar(n), gain(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f[2] = {0, 0}, s0 = 0, sz = 0, sd = 0, sdz = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = kt(i, k);
      f[sample.instrument[k]] += v;
      s0 += v;
      sz += v * sample.instrument[k];
      sd += v * sample.treatment[k];
      sdz += v * sample.treatment[k] * sample.instrument[k];
    }
    s[i] = sample.instrument[i] == 1 ? f[0] : -f[1];
    zbar[i] = sz / s0;
    // first-stage slope in raw sums, scaled by s0 like the LATE denominator
    double stage = sdz - zbar[i] * sd;
    if (!(std::abs(stage) / s0 >= denominator_floor)) stage = std::copysign(denominator_floor * s0, stage);
    gain[i] = 1.0 / stage;
  }

  DenseTable d;
  d.rows = Gw * Gx;
  d.cols = n;
  d.values.assign(d.rows * d.cols, 0.0);
  for (std::size_t gw = 0; gw < Gw; ++gw)
    for (std::size_t gx = 0; gx < Gx; ++gx) {
      const double w = grid_w[gw], x = grid_x[gx];
      double* row = &d.values[(gw * Gx + gx) * n];
      for (std::size_t k = 0; k < n; ++k) {
        const int zk = sample.instrument[k];
        double psi = sample.covariate[k] <= x ? lambda_fn(late.w_hat[k] - w) * s[k] : 0.0;
        double phi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (sample.covariate[i] > x) continue;
          psi -= lambda_fn(late.w_hat[i] - w) * kt(i, k) * (zk - sample.instrument[i]);
          const double c = late.w_hat[i] < w && sample.treatment[i] == 0 ? -s[i] : 0.0;
          phi += c * kt(i, k) * (zk - zbar[i]) * gain[i];
        }
        phi *= late.w_hat[k] - late.cond_mean_w[k];
        row[k] = psi + phi;
      }
      const double mean = std::accumulate(row, row + n, 0.0) / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) row[k] -= mean;
    }
  return d;
}

}  // namespace hette::reference
