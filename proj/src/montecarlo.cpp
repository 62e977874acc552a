#include "hette/montecarlo.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hette/continuous_test.hpp"
#include "hette/rng.hpp"

namespace hette {

void DgpSpec::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InputError("gamma must lie in [0, 1]");
  if (!(rho > -1.0 && rho < 1.0)) throw InputError("rho must lie in (-1, 1)");
  if (!(p_z > 0.0 && p_z < 1.0)) throw InputError("p must lie in (0, 1)");
  if (n < 2) throw InputError("n must be at least 2");
}

Sample simulate(const DgpSpec& spec) {
  spec.validate();
  RandomStream rng(spec.seed);
  Sample s;
  s.covariate_kind = spec.covariate_kind;
  s.outcome.resize(spec.n);
  s.treatment.resize(spec.n);
  s.instrument.resize(spec.n);
  s.covariate.resize(spec.n);
  const double tail = std::sqrt(1.0 - spec.rho * spec.rho);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double u = rng.uniform();
    const double x = spec.covariate_kind == CovariateKind::Discrete ? 1.0 + std::floor(4.0 * u) : u;
    const int z = rng.uniform() < spec.p_z ? 1 : 0;
    const double eps = rng.normal();
    const double eta = spec.rho * eps + tail * rng.normal();
    const int d = normal_cdf(eta) <= 0.5 * z ? 1 : 0;
    s.covariate[i] = x;
    s.instrument[i] = z;
    s.treatment[i] = d;
    s.outcome[i] = d + x + (spec.gamma + (1.0 - spec.gamma) * d) * eps;
  }
  return s;
}

void RejectionSweep::validate() const {
  if (gammas.empty() || p_values.empty() || sample_sizes.empty() || bandwidth_constants.empty())
    throw InputError("rejection sweep needs at least one value per dimension");
  for (double c : bandwidth_constants)
    if (!(c > 0.0)) throw InputError("bandwidth constant must be positive");
  for (double g : gammas) DgpSpec{g, rho, 0.5, 2, covariate_kind, 0}.validate();
  for (double p : p_values) DgpSpec{1.0, rho, p, 2, covariate_kind, 0}.validate();
  for (std::size_t n : sample_sizes)
    if (n < 2) throw InputError("n must be at least 2");
}

RejectionSweep published_sweep(int table) {
  if (table != 1 && table != 2) throw InputError("table must be 1 or 2");
  RejectionSweep s;
  s.covariate_kind = table == 1 ? CovariateKind::Discrete : CovariateKind::Continuous;
  s.gammas = {1.0, 0.75, 0.5};
  s.p_values = {0.25, 0.5, 0.75};
  s.sample_sizes = {1000, 2000, 4000};
  s.bandwidth_constants = {0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3};
  return s;
}

double RejectionCell::frequency() const {
  const int ok = reps - failures;
  return ok > 0 ? static_cast<double>(rejections) / ok : std::numeric_limits<double>::quiet_NaN();
}

const RejectionCell& RejectionGrid::find(double gamma, double p_z, std::size_t n, double c) const {
  const auto near = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  for (const auto& cell : cells)
    if (near(cell.gamma, gamma) && near(cell.p_z, p_z) && cell.n == n && near(cell.c, c)) return cell;
  throw std::out_of_range("no such design point in rejection grid");
}

namespace {

struct RepOutcome {
  std::vector<char> reject;   // per c
  std::vector<double> p;      // per c, NaN on failure
  std::string error;
};

}  // namespace

RejectionGrid rejection_table(const RejectionSweep& sweep, const TestConfig& config_template, int n_reps,
                              std::uint64_t master_seed) {
  sweep.validate();
  config_template.validate();
  if (n_reps < 1) throw InputError("reps must be at least 1");

  struct Design {
    double gamma, p;
    std::size_t n;
  };
  std::vector<Design> designs;
  for (double g : sweep.gammas)
    for (double p : sweep.p_values)
      for (std::size_t n : sweep.sample_sizes) designs.push_back({g, p, n});

  const std::size_t reps = static_cast<std::size_t>(n_reps);
  const std::size_t n_c = sweep.bandwidth_constants.size();
  std::vector<RepOutcome> outcomes(designs.size() * reps);

  const int saved_levels = omp_get_max_active_levels();
  omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t task = 0; task < outcomes.size(); ++task) {
    const std::size_t d = task / reps, r = task % reps;
    RepOutcome& out = outcomes[task];
    out.reject.assign(n_c, 0);
    out.p.assign(n_c, std::numeric_limits<double>::quiet_NaN());
    const std::uint64_t rep_seed = derive_seed({master_seed, d, r});
    Sample data;
    try {
      data = simulate({designs[d].gamma, sweep.rho, designs[d].p, designs[d].n, sweep.covariate_kind, rep_seed});
    } catch (const std::exception& e) {
      out.error = e.what();
      continue;
    }
    TestConfig config = config_template;
    config.mode = sweep.covariate_kind;
    config.seed = derive_seed({rep_seed, 1});
    for (std::size_t k = 0; k < n_c; ++k) {
      config.bandwidth_constant = sweep.bandwidth_constants[k];
      try {
        const TestReport report = run_test(data, config);
        out.reject[k] = report.reject ? 1 : 0;
        out.p[k] = report.p_value;
      } catch (const std::exception& e) {
        if (out.error.empty()) out.error = e.what();
      }
    }
  }
  omp_set_max_active_levels(saved_levels);

  RejectionGrid grid;
  grid.covariate_kind = sweep.covariate_kind;
  grid.n_reps = n_reps;
  grid.n_bootstrap = config_template.n_bootstrap;
  grid.alpha = config_template.alpha;
  grid.master_seed = master_seed;
  int total_failures = 0;
  std::string first_error;
  for (std::size_t d = 0; d < designs.size(); ++d) {
    for (std::size_t k = 0; k < n_c; ++k) {
      RejectionCell cell;
      cell.gamma = designs[d].gamma;
      cell.p_z = designs[d].p;
      cell.n = designs[d].n;
      cell.c = sweep.bandwidth_constants[k];
      cell.reps = n_reps;
      for (std::size_t r = 0; r < reps; ++r) {
        const RepOutcome& o = outcomes[d * reps + r];
        if (std::isnan(o.p[k])) {
          ++cell.failures;
          if (first_error.empty()) first_error = o.error;
          continue;
        }
        cell.rejections += o.reject[k];
        cell.p_values.push_back(o.p[k]);
      }
      total_failures += cell.failures;
      grid.cells.push_back(std::move(cell));
    }
  }
  if (total_failures > 0) {
    grid.diagnostics["failed_replications"] = std::to_string(total_failures);
    grid.diagnostics["first_failure"] = first_error;
  }
  return grid;
}

std::string rejection_grid_csv(const RejectionGrid& grid) {
  std::ostringstream os;
  os << "gamma,p,n,c,reps,rejections,failures,frequency\n";
  char buf[256];
  for (const auto& c : grid.cells) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f,%zu,%.2f,%d,%d,%d,%.4f\n", c.gamma, c.p_z, c.n, c.c, c.reps,
                  c.rejections, c.failures, c.frequency());
    os << buf;
  }
  return os.str();
}

std::string rejection_grid_text(const RejectionGrid& grid) {
  std::vector<double> gammas, cs;
  const auto add = [](std::vector<double>& v, double x) {
    for (double y : v)
      if (std::abs(x - y) < 1e-12) return;
    v.push_back(x);
  };
  for (const auto& c : grid.cells) {
    add(gammas, c.gamma);
    add(cs, c.c);
  }
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "reps=%d  B=%d  alpha=%.3g\n", grid.n_reps, grid.n_bootstrap, grid.alpha);
  os << buf;
  for (double g : gammas) {
    std::snprintf(buf, sizeof buf, "\ngamma = %.2f\n", g);
    os << buf << "   p      n";
    for (double c : cs) {
      std::snprintf(buf, sizeof buf, "  c=%-5.2f", c);
      os << buf;
    }
    os << '\n';
    double last_p = std::numeric_limits<double>::quiet_NaN();
    std::size_t last_n = 0;
    for (const auto& cell : grid.cells) {
      if (std::abs(cell.gamma - g) > 1e-12) continue;
      if (cell.p_z == last_p && cell.n == last_n) continue;
      last_p = cell.p_z;
      last_n = cell.n;
      std::snprintf(buf, sizeof buf, "%4.2f %6zu", cell.p_z, cell.n);
      os << buf;
      for (double c : cs) {
        std::snprintf(buf, sizeof buf, "  %7.4f", grid.find(g, cell.p_z, cell.n, c).frequency());
        os << buf;
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace hette
