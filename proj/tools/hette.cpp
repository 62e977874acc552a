// hette: test for heterogeneous treatment effects with a binary instrument.
//
//   hette test FILE [options]       run the test on a delimited data file
//   hette simulate [options]        Monte Carlo rejection frequencies
//   hette generate --shape S        write a synthetic dataset
//
// Exit codes: 0 ran, 2 input error, 3 numerical failure.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hette/continuous_test.hpp"
#include "hette/dataset.hpp"
#include "hette/montecarlo.hpp"
#include "hette/report_io.hpp"
#include "synthetic.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct TuningFlags {
  std::string preset = "mc";
  std::string mode = "auto";
  double bandwidth_c = 1.0;
  std::string bandwidth_rule = "mc";
  double bandwidth_h = 0.0;
  int bootstrap = 500;
  int grid_w = 0;
  int grid_x = 0;
  std::string grid_kind = "quantile";
  double alpha = 0.05;
  std::string multiplier = "rademacher";
  std::string influence = "projection";
  std::string seed;
  int threads = 0;

  CLI::Option* bandwidth_c_opt = nullptr;
  CLI::Option* bandwidth_rule_opt = nullptr;
  CLI::Option* bootstrap_opt = nullptr;
  CLI::Option* grid_w_opt = nullptr;
  CLI::Option* grid_x_opt = nullptr;
};

void add_tuning(CLI::App& app, TuningFlags& f, bool with_preset) {
  if (with_preset)
    app.add_option("--preset", f.preset, "Tuning preset")->check(CLI::IsMember({"mc", "empirical"}));
  app.add_option("--mode", f.mode, "Covariate regime")->check(CLI::IsMember({"auto", "discrete", "continuous"}));
  f.bandwidth_c_opt = app.add_option("--bandwidth-c", f.bandwidth_c, "Bandwidth constant c");
  f.bandwidth_rule_opt = app.add_option("--bandwidth-rule", f.bandwidth_rule, "c*std*n^-1/5 (mc), n^-1/4 (empirical) or fixed")
                             ->check(CLI::IsMember({"mc", "empirical", "fixed"}));
  app.add_option("--bandwidth", f.bandwidth_h, "Bandwidth for --bandwidth-rule fixed");
  f.bootstrap_opt = app.add_option("--bootstrap", f.bootstrap, "Multiplier bootstrap draws");
  f.grid_w_opt = app.add_option("--grid-w", f.grid_w, "Grid points for w");
  f.grid_x_opt = app.add_option("--grid-x", f.grid_x, "Grid points for x (continuous mode)");
  app.add_option("--grid-kind", f.grid_kind, "Grid placement")->check(CLI::IsMember({"quantile", "equal", "sample"}));
  app.add_option("--alpha", f.alpha, "Nominal level");
  app.add_option("--multiplier", f.multiplier, "Bootstrap multipliers")
      ->check(CLI::IsMember({"rademacher", "normal", "mammen"}));
  app.add_option("--influence", f.influence, "Continuous-mode influence function")
      ->check(CLI::IsMember({"projection", "plug-in"}));
  app.add_option("--seed", f.seed, "Seed (falls back to HETTE_SEED, then 0)");
  app.add_option("--threads", f.threads, "Worker threads (0 = OpenMP default)");
}

std::uint64_t resolve_seed(const std::string& flag) {
  std::string text = flag;
  if (text.empty()) {
    const char* env = std::getenv("HETTE_SEED");
    if (env == nullptr || *env == '\0') return 0;
    text = env;
  }
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.front() == '-') throw hette::InputError("invalid seed '" + text + "'");
  return v;
}

hette::MultiplierKind parse_multiplier(const std::string& s) {
  if (s == "normal") return hette::MultiplierKind::StandardNormal;
  if (s == "mammen") return hette::MultiplierKind::Mammen;
  return hette::MultiplierKind::Rademacher;
}

hette::GridKind parse_grid_kind(const std::string& s) {
  if (s == "equal") return hette::GridKind::Equal;
  if (s == "sample") return hette::GridKind::AllSamplePoints;
  return hette::GridKind::Quantile;
}

// Preset values first, explicit flags on top.
hette::TestConfig build_config(const TuningFlags& f, hette::TestMode mode) {
  hette::TestConfig c;
  c.mode = mode;
  const bool empirical = f.preset == "empirical";
  if (empirical) {
    c.bandwidth_rule = hette::BandwidthRule::empirical();
    c.bandwidth_constant = 1.06;
    c.n_bootstrap = 10000;
    if (mode == hette::TestMode::Discrete) {
      c.grid_w = 5000;
    } else {
      c.grid_w = 100;
      c.grid_x = 100;
    }
  }
  if (f.bandwidth_rule_opt->count() > 0) {
    if (f.bandwidth_rule == "fixed")
      c.bandwidth_rule = hette::BandwidthRule::fixed(f.bandwidth_h);
    else if (f.bandwidth_rule == "empirical")
      c.bandwidth_rule = hette::BandwidthRule::empirical();
    else
      c.bandwidth_rule = hette::BandwidthRule::monte_carlo();
  }
  if (f.bandwidth_c_opt->count() > 0) c.bandwidth_constant = f.bandwidth_c;
  if (f.bootstrap_opt->count() > 0) c.n_bootstrap = f.bootstrap;
  if (f.grid_w_opt->count() > 0) c.grid_w = f.grid_w;
  if (f.grid_x_opt->count() > 0) c.grid_x = f.grid_x;
  c.grid_kind = parse_grid_kind(f.grid_kind);
  c.alpha = f.alpha;
  c.multiplier = parse_multiplier(f.multiplier);
  c.influence_form = f.influence == "plug-in" ? hette::InfluenceForm::PlugIn : hette::InfluenceForm::Projection;
  c.seed = resolve_seed(f.seed);
  c.validate();
  return c;
}

void apply_threads(int threads) {
  if (threads < 0) throw hette::InputError("--threads must be non-negative");
  if (threads > 0) omp_set_num_threads(threads);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hette::InputError("cannot write " + path);
  out << text;
}

struct TestFlags {
  std::string input;
  std::string out;
  hette::ColumnNames columns;
  std::size_t max_levels = 20;
  bool quiet = false;
};

int run_test_command(const TuningFlags& f, const TestFlags& t) {
  apply_threads(f.threads);
  hette::DatasetOptions opts;
  opts.columns = t.columns;
  opts.max_discrete_levels = t.max_levels;
  if (f.mode == "discrete") opts.kind = hette::CovariateKind::Discrete;
  if (f.mode == "continuous") opts.kind = hette::CovariateKind::Continuous;
  const hette::Dataset ds = hette::read_dataset_file(t.input, opts);

  const hette::Sample sample = hette::canonical_order(ds.sample);
  const hette::TestConfig config = build_config(f, sample.covariate_kind);
  const hette::TestReport report = hette::run_test(sample, config);

  hette::ReportContext ctx;
  ctx.input = std::filesystem::path(t.input).filename().string();
  ctx.preset = f.preset;
  ctx.dropped_rows = ds.dropped_rows;
  const std::string doc = hette::report_to_json(report, config, ctx).dump(2) + "\n";
  if (t.out.empty())
    std::cout << doc;
  else
    write_text(t.out, doc);
  if (!t.quiet) {
    std::cerr << hette::report_summary(report);
    if (ds.dropped_rows > 0) std::cerr << "dropped     " << ds.dropped_rows << " rows with missing values\n";
  }
  return 0;
}

struct SimulateFlags {
  int published_table = 0;
  std::string gammas = "1,0.75,0.5";
  std::string p_values = "0.5";
  std::string sizes = "1000";
  std::string constants = "1";
  double rho = 0.7;
  int reps = 100;
  std::string out_dir;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* p_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* c_opt = nullptr;
};

template <class T>
std::vector<T> parse_list(const std::string& text, const char* name) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw hette::InputError(std::string("invalid value '") + item + "' in --" + name);
    out.push_back(v);
  }
  return out;
}

int run_simulate_command(const TuningFlags& f, const SimulateFlags& s) {
  apply_threads(f.threads);
  hette::RejectionSweep sweep;
  if (s.published_table != 0) {
    sweep = hette::published_sweep(s.published_table);
  } else {
    sweep.covariate_kind = f.mode == "continuous" ? hette::CovariateKind::Continuous : hette::CovariateKind::Discrete;
    sweep.gammas = {1.0, 0.75, 0.5};
    sweep.p_values = {0.5};
    sweep.sample_sizes = {1000};
    sweep.bandwidth_constants = {1.0};
  }
  if (s.gamma_opt->count() > 0) sweep.gammas = parse_list<double>(s.gammas, "gamma");
  if (s.p_opt->count() > 0) sweep.p_values = parse_list<double>(s.p_values, "p");
  if (s.n_opt->count() > 0) sweep.sample_sizes = parse_list<std::size_t>(s.sizes, "n");
  if (s.c_opt->count() > 0) sweep.bandwidth_constants = parse_list<double>(s.constants, "c");
  sweep.rho = s.rho;
  sweep.validate();
  if (s.reps < 1) throw hette::InputError("--reps must be at least 1");

  hette::TestConfig config = build_config(f, sweep.covariate_kind);
  const std::uint64_t seed = config.seed;

  // Time one replicate at the smallest design to estimate the total.
  {
    hette::DgpSpec spec;
    spec.covariate_kind = sweep.covariate_kind;
    spec.n = *std::min_element(sweep.sample_sizes.begin(), sweep.sample_sizes.end());
    spec.seed = hette::derive_seed({seed, 0xca11b});
    spec.rho = sweep.rho;
    const hette::Sample probe = hette::simulate(spec);
    hette::TestConfig probe_config = config;
    probe_config.seed = spec.seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      hette::run_test(probe, probe_config);
    } catch (const std::exception&) {
    }
    const double one = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double scale = 0.0;
    for (std::size_t n : sweep.sample_sizes) {
      const double r = static_cast<double>(n) / static_cast<double>(spec.n);
      scale += r * r;
    }
    const double tasks = static_cast<double>(sweep.gammas.size() * sweep.p_values.size() *
                                             sweep.bandwidth_constants.size()) * s.reps * scale;
    const double estimate = one * tasks / std::max(1, omp_get_max_threads());
    std::cerr << "runtime estimate: about " << static_cast<long>(estimate + 0.5) << " s on " << omp_get_max_threads()
              << " threads (" << sweep.gammas.size() * sweep.p_values.size() * sweep.sample_sizes.size()
              << " designs x " << sweep.bandwidth_constants.size() << " bandwidths x " << s.reps << " reps)\n";
  }

  const hette::RejectionGrid grid = hette::rejection_table(sweep, config, s.reps, seed);
  const std::string csv = hette::rejection_grid_csv(grid);
  const std::string text = hette::rejection_grid_text(grid);
  if (s.out_dir.empty()) {
    std::cout << csv;
    std::cerr << text;
  } else {
    std::filesystem::create_directories(s.out_dir);
    write_text((std::filesystem::path(s.out_dir) / "rejection_grid.csv").string(), csv);
    write_text((std::filesystem::path(s.out_dir) / "rejection_grid.txt").string(), text);
    std::cout << text;
  }
  for (const auto& [name, message] : grid.diagnostics) std::cerr << "warning: " << name << ": " << message << "\n";
  return 0;
}

struct GenerateFlags {
  std::string shape = "null-discrete";
  std::size_t n = 2000;
  std::string seed;
  std::string out;
};

int run_generate_command(const GenerateFlags& g) {
  const hette::Sample s = hette::tools::synthetic(g.shape, g.n, resolve_seed(g.seed));
  if (g.out.empty()) {
    hette::write_dataset(std::cout, s);
  } else {
    std::ofstream out(g.out, std::ios::binary);
    if (!out) throw hette::InputError("cannot write " + g.out);
    hette::write_dataset(out, s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Test for unobserved heterogeneous treatment effects with a binary instrument"};
  app.set_version_flag("--version", std::string(hette::kToolVersion));
  app.require_subcommand(1);

  TuningFlags test_tuning;
  TestFlags test_flags;
  auto* test = app.add_subcommand("test", "Run the test on a data file");
  test->add_option("file", test_flags.input, "Comma- or tab-delimited file with a header row")->required();
  add_tuning(*test, test_tuning, true);
  test->add_option("--y", test_flags.columns.outcome, "Outcome column");
  test->add_option("--d", test_flags.columns.treatment, "Treatment column");
  test->add_option("--z", test_flags.columns.instrument, "Instrument column");
  test->add_option("--x", test_flags.columns.covariate, "Covariate column");
  test->add_option("--max-levels", test_flags.max_levels, "Largest number of distinct covariate values treated as discrete");
  test->add_option("--out", test_flags.out, "Report file (default stdout)");
  test->add_flag("--quiet", test_flags.quiet, "No summary on stderr");

  TuningFlags sim_tuning;
  SimulateFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo rejection frequencies");
  add_tuning(*sim, sim_tuning, false);
  sim->add_option("--paper-table", sim_flags.published_table, "Full published sweep: 1 discrete, 2 continuous")
      ->check(CLI::IsMember({1, 2}));
  sim_flags.gamma_opt = sim->add_option("--gamma", sim_flags.gammas, "Comma-separated gamma values");
  sim_flags.p_opt = sim->add_option("--p", sim_flags.p_values, "Comma-separated P(Z=1) values");
  sim_flags.n_opt = sim->add_option("--n", sim_flags.sizes, "Comma-separated sample sizes");
  sim_flags.c_opt = sim->add_option("--c", sim_flags.constants, "Comma-separated bandwidth constants");
  sim->add_option("--rho", sim_flags.rho, "Correlation of the outcome and selection errors");
  sim->add_option("--reps", sim_flags.reps, "Replications per design");
  sim->add_option("--out-dir", sim_flags.out_dir, "Directory for rejection_grid.csv and rejection_grid.txt");

  GenerateFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  gen->add_option("--shape", gen_flags.shape, "jtpa, census, null-discrete, null-continuous, alt-discrete, alt-continuous");
  gen->add_option("--n", gen_flags.n, "Rows");
  gen->add_option("--seed", gen_flags.seed, "Seed (falls back to HETTE_SEED, then 0)");
  gen->add_option("--out", gen_flags.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (test->parsed()) return run_test_command(test_tuning, test_flags);
    if (sim->parsed()) return run_simulate_command(sim_tuning, sim_flags);
    return run_generate_command(gen_flags);
  } catch (const hette::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const hette::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
