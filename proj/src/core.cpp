#include "hette/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

namespace hette {

const char* to_string(CovariateKind kind) {
  return kind == CovariateKind::Discrete ? "discrete" : "continuous";
}

const char* to_string(MultiplierKind kind) {
  switch (kind) {
    case MultiplierKind::Rademacher: return "rademacher";
    case MultiplierKind::StandardNormal: return "normal";
    case MultiplierKind::Mammen: return "mammen";
  }
  return "unknown";
}

const char* to_string(GridKind kind) {
  switch (kind) {
    case GridKind::Quantile: return "quantile";
    case GridKind::Equal: return "equal";
    case GridKind::AllSamplePoints: return "sample";
  }
  return "unknown";
}

const char* to_string(InfluenceForm form) {
  return form == InfluenceForm::Projection ? "projection" : "plug-in";
}

Sample canonical_order(const Sample& sample) {
  const std::size_t n = sample.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(sample.covariate[a], sample.instrument[a], sample.treatment[a], sample.outcome[a]) <
           std::tie(sample.covariate[b], sample.instrument[b], sample.treatment[b], sample.outcome[b]);
  });
  Sample out;
  out.covariate_kind = sample.covariate_kind;
  out.outcome.reserve(n);
  out.treatment.reserve(n);
  out.instrument.reserve(n);
  out.covariate.reserve(n);
  for (std::size_t i : order) {
    out.outcome.push_back(sample.outcome[i]);
    out.treatment.push_back(sample.treatment[i]);
    out.instrument.push_back(sample.instrument[i]);
    out.covariate.push_back(sample.covariate[i]);
  }
  return out;
}

namespace {

std::string format_level(double x) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << x;
  return os.str();
}

std::size_t count_non_binary(const std::vector<int>& v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](int b) { return b != 0 && b != 1; }));
}

}  // namespace

CellIndex build_cells(const Sample& sample) {
  CellIndex cells;
  cells.levels = sample.covariate;
  std::sort(cells.levels.begin(), cells.levels.end());
  cells.levels.erase(std::unique(cells.levels.begin(), cells.levels.end()), cells.levels.end());
  const std::size_t levels = cells.levels.size();
  for (int z = 0; z < 2; ++z) {
    cells.count[z].assign(levels, 0);
    cells.treated[z].assign(levels, 0);
  }
  cells.cell_of.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto it = std::lower_bound(cells.levels.begin(), cells.levels.end(), sample.covariate[i]);
    const auto c = static_cast<std::size_t>(it - cells.levels.begin());
    cells.cell_of[i] = c;
    const int z = sample.instrument[i];
    ++cells.count[z][c];
    cells.treated[z][c] += static_cast<std::size_t>(sample.treatment[i]);
  }
  return cells;
}

ValidationResult validate_sample(const Sample& sample) {
  ValidationResult result;
  auto& v = result.violations;
  const std::size_t n = sample.outcome.size();
  if (sample.treatment.size() != n || sample.instrument.size() != n || sample.covariate.size() != n) {
    v.push_back("length mismatch between outcome, treatment, instrument and covariate");
    return result;
  }
  if (n < 2) v.push_back("fewer than 2 observations");

  const auto non_finite = [](const std::vector<double>& xs) {
    return std::count_if(xs.begin(), xs.end(), [](double x) { return !std::isfinite(x); });
  };
  if (const auto k = non_finite(sample.outcome); k > 0)
    v.push_back("outcome has " + std::to_string(k) + " non-finite values");
  if (const auto k = non_finite(sample.covariate); k > 0)
    v.push_back("covariate has " + std::to_string(k) + " non-finite values");

  const std::size_t bad_d = count_non_binary(sample.treatment);
  const std::size_t bad_z = count_non_binary(sample.instrument);
  if (bad_d > 0) v.push_back("treatment has " + std::to_string(bad_d) + " non-binary values");
  if (bad_z > 0) v.push_back("instrument has " + std::to_string(bad_z) + " non-binary values");
  if (bad_d > 0 || bad_z > 0 || n == 0) return result;

  const auto z_ones = std::count(sample.instrument.begin(), sample.instrument.end(), 1);
  if (z_ones == 0 || static_cast<std::size_t>(z_ones) == n) {
    v.push_back("instrument has a single support point");
    return result;
  }

  if (sample.covariate_kind == CovariateKind::Discrete) {
    if (non_finite(sample.covariate) > 0) return result;
    const CellIndex cells = build_cells(sample);
    for (std::size_t c = 0; c < cells.num_levels(); ++c) {
      const std::string x = format_level(cells.levels[c]);
      bool empty = false;
      for (int z = 0; z < 2; ++z) {
        if (cells.count[z][c] == 0) {
          v.push_back("empty (x," + std::to_string(z) + ") cell at x=" + x);
          empty = true;
        }
      }
      if (empty) continue;
      const double p1 = static_cast<double>(cells.treated[1][c]) / static_cast<double>(cells.count[1][c]);
      const double p0 = static_cast<double>(cells.treated[0][c]) / static_cast<double>(cells.count[0][c]);
      if (p1 == p0) v.push_back("zero estimated first stage in cell x=" + x);
    }
  } else {
    double d1 = 0, d0 = 0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sample.instrument[i] == 1) {
        d1 += sample.treatment[i];
        ++n1;
      } else {
        d0 += sample.treatment[i];
        ++n0;
      }
    }
    if (d1 / static_cast<double>(n1) == d0 / static_cast<double>(n0))
      v.push_back("zero estimated first stage");
  }
  return result;
}

void TestConfig::validate() const {
  if (!(bandwidth_constant > 0.0) || !std::isfinite(bandwidth_constant))
    throw InputError("bandwidth constant must be positive");
  if (bandwidth_rule.kind == BandwidthRuleKind::Fixed && !(bandwidth_rule.fixed_h > 0.0))
    throw InputError("fixed bandwidth must be positive");
  if (n_bootstrap < 1) throw InputError("n_bootstrap must be at least 1");
  if (grid_w && *grid_w < 2) throw InputError("grid_w must be at least 2");
  if (grid_x && *grid_x < 2) throw InputError("grid_x must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(denominator_floor > 0.0)) throw InputError("denominator floor must be positive");
  if (!(max_floored_fraction >= 0.0 && max_floored_fraction <= 1.0))
    throw InputError("max floored fraction must lie in [0, 1]");
  if (kernel.evaluate == nullptr) throw InputError("kernel is not set");
}

int TestConfig::resolved_grid_w(TestMode m, std::size_t n) const {
  if (grid_w) return *grid_w;
  const std::size_t div = m == TestMode::Discrete ? 10 : 20;
  return std::max(2, static_cast<int>((n + div - 1) / div));
}

int TestConfig::resolved_grid_x(std::size_t n) const {
  if (grid_x) return *grid_x;
  return std::max(2, static_cast<int>((n + 19) / 20));
}

double bootstrap_p_value(const std::vector<double>& draws, double statistic) {
  const auto exceed = std::count_if(draws.begin(), draws.end(), [&](double d) { return d >= statistic; });
  return (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(draws.size()));
}

double bootstrap_critical_value(const std::vector<double>& draws, double alpha) {
  // p <= alpha  <=>  #{draws >= T} <= k with k = floor(alpha (B + 1)) - 1
  //             <=>  T > k-th largest draw (0-based).
  const double slots = std::floor(alpha * (static_cast<double>(draws.size()) + 1.0) + 1e-9);
  const long k = static_cast<long>(slots) - 1;
  if (k < 0) return std::numeric_limits<double>::infinity();
  std::vector<double> sorted = draws;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return std::nextafter(sorted[static_cast<std::size_t>(k)], std::numeric_limits<double>::infinity());
}

}  // namespace hette
