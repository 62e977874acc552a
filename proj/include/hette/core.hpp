#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hette/kernel.hpp"

namespace hette {

enum class CovariateKind { Discrete, Continuous };
using TestMode = CovariateKind;

const char* to_string(CovariateKind kind);

/// Observed micro-data. Binary flags are stored as 0/1 integers so the
/// estimators can use them directly as indicators.
struct Sample {
  std::vector<double> outcome;
  std::vector<int> treatment;
  std::vector<int> instrument;
  std::vector<double> covariate;
  CovariateKind covariate_kind = CovariateKind::Discrete;

  std::size_t size() const { return outcome.size(); }
};

/// Rows sorted by (covariate, instrument, treatment, outcome). Any row
/// permutation of a sample maps to the same canonical sample.
Sample canonical_order(const Sample& sample);

// Input problems the caller can fix (bad file, bad flags, invalid sample).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Estimation broke down on valid input (irrelevant instrument, weak first stage).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named warnings, ordered by key so serialized output is stable.
using Diagnostics = std::map<std::string, std::string>;

struct ValidationResult {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Pure check of the sample invariants. Messages never mention row
/// positions, so permuting rows yields the same violation list.
ValidationResult validate_sample(const Sample& sample);

/// Distinct covariate levels of a discrete sample and per-(level, z) counts.
struct CellIndex {
  std::vector<double> levels;             // sorted ascending
  std::vector<std::size_t> cell_of;       // level index for each row
  std::vector<std::size_t> count[2];      // rows per (level, z)
  std::vector<std::size_t> treated[2];    // rows with D = 1 per (level, z)

  std::size_t num_levels() const { return levels.size(); }
};

CellIndex build_cells(const Sample& sample);

enum class MultiplierKind { Rademacher, StandardNormal, Mammen };

const char* to_string(MultiplierKind kind);

enum class GridKind { Quantile, Equal, AllSamplePoints };

const char* to_string(GridKind kind);

// Construction of the continuous-mode influence functions; see
// InfluenceTableC.
enum class InfluenceForm { Projection, PlugIn };

const char* to_string(InfluenceForm form);

struct TestConfig {
  std::optional<TestMode> mode;           // defaults to the sample's covariate kind
  KernelFn kernel = gaussian();
  double bandwidth_constant = 1.0;
  BandwidthRule bandwidth_rule = BandwidthRule::monte_carlo();
  int n_bootstrap = 500;
  std::optional<int> grid_w;              // default ceil(n/10) discrete, ceil(n/20) continuous
  std::optional<int> grid_x;              // continuous only, default ceil(n/20)
  GridKind grid_kind = GridKind::Quantile;
  double alpha = 0.05;
  MultiplierKind multiplier = MultiplierKind::Rademacher;
  std::uint64_t seed = 0;
  InfluenceForm influence_form = InfluenceForm::Projection;  // continuous mode
  double denominator_floor = 1e-10;
  double max_floored_fraction = 0.05;

  /// Throws InputError naming the first violated constraint.
  void validate() const;

  TestMode resolved_mode(const Sample& sample) const { return mode.value_or(sample.covariate_kind); }
  int resolved_grid_w(TestMode m, std::size_t n) const;
  int resolved_grid_x(std::size_t n) const;
};

struct TestReport {
  TestMode mode = TestMode::Discrete;
  double statistic = 0.0;
  double p_value = 1.0;
  // Smallest statistic value that rejects; +inf when B is too small for alpha.
  double critical_value = 0.0;
  bool reject = false;
  double alpha = 0.05;
  std::vector<double> bootstrap_draws;
  double bandwidth_used = 0.0;
  std::vector<double> grid_w_used;
  std::vector<double> grid_x_used;
  std::pair<double, double> argmax{0.0, 0.0};  // (w, x)
  std::size_t n = 0;
  int n_bootstrap = 0;
  std::uint64_t seed = 0;
  Diagnostics diagnostics;
};

/// Bootstrap p-value (1 + #{draw >= statistic}) / (1 + B).
double bootstrap_p_value(const std::vector<double>& draws, double statistic);

/// Critical value consistent with bootstrap_p_value: statistic >= c
/// exactly when p_value <= alpha.
double bootstrap_critical_value(const std::vector<double>& draws, double alpha);

}  // namespace hette
