#include <omp.h>

#include <cmath>

#include "doctest.h"
#include "hette/continuous_test.hpp"
#include "hette/grid.hpp"
#include "hette/montecarlo.hpp"
#include "hette/reference.hpp"
#include "oracle.hpp"

using namespace hette;

namespace {

Sample fixture() {
  Sample s;
  s.covariate = {0.1, 0.4, 0.35, 0.8, 0.55, 0.2, 0.9, 0.65};
  s.outcome = {1.0, 2.5, 0.3, 4.0, 2.2, 1.1, 3.3, 2.0};
  s.treatment = {0, 1, 0, 1, 1, 0, 1, 0};
  s.instrument = {0, 1, 0, 1, 1, 1, 0, 0};
  s.covariate_kind = CovariateKind::Continuous;
  return s;
}

const std::vector<double> kGridW = {0.5, 1.5, 2.5, 3.5};
const std::vector<double> kGridX = {0.3, 0.6, 0.9};
constexpr double kH = 0.7;

struct Fit {
  Sample s;
  LateFit late;
  JointDensity f;
};

Fit fit(const Sample& s, double h) {
  LateOptions o;
  o.max_floored_fraction = 1.0;
  Fit out{s, late_continuous(s, h, gaussian(), o), {}};
  out.f = joint_density_at_sample(kernel_sums_at_sample(s, h, gaussian(), true), s.size(), h);
  return out;
}

InfluenceOptions form(InfluenceForm f) {
  InfluenceOptions o;
  o.form = f;
  return o;
}

}  // namespace

TEST_CASE("statistic on the fixture, reference value") {
  // numpy transcription of sqrt(n) max |G0 - G1| on the same grids
  const Fit a = fit(fixture(), kH);
  const GTable g = g_hat(a.s, a.late, a.f, kGridW, kGridX);
  CHECK(statistic_continuous(g).value == doctest::Approx(0.10189846634660563).epsilon(1e-12));
}

TEST_CASE("G matches the direct double loop") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Fit a = fit(oracle::random_fixture(seed, 40, false), 0.2);
    const auto gw = quantile_grid(a.late.w_hat, 9), gx = equal_grid(a.s.covariate, 6);
    const GTable fast = g_hat(a.s, a.late, a.f, gw, gx);
    const GTable slow = reference::g_hat_direct(a.s, a.late, a.f, gw, gx);
    for (int z = 0; z < 2; ++z)
      for (std::size_t k = 0; k < fast.values[z].size(); ++k)
        CHECK(fast.values[z][k] == doctest::Approx(slow.values[z][k]).epsilon(1e-12).scale(1e-3));
  }
}

TEST_CASE("projection influence, reference values") {
  const Fit a = fit(fixture(), kH);
  const InfluenceTableC t = influence_continuous(a.s, a.late, kGridW, kGridX, gaussian(), kH);
  const std::vector<double> at_1_1 = {0.10183887093247695, -0.008672649755797894, -0.0376073756788158,
                                      0.18021728942555862, -0.0576097117367504,  0.039504236473118334,
                                      -0.0003264593903662544, -0.21734420026942355};
  const std::vector<double> at_3_0 = {-0.18892290459038494, -0.06364300696277354, 0.27871007008012194,
                                      -0.020120402516309702, -0.06261042505663965, 0.1234334528759571,
                                      0.015718260864309313,  -0.08256504469428054};
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(t.psi(1, 1, k) + t.phi(1, 1, k) == doctest::Approx(at_1_1[k]).epsilon(1e-10));
    CHECK(t.psi(3, 0, k) + t.phi(3, 0, k) == doctest::Approx(at_3_0[k]).epsilon(1e-10));
  }
  const std::vector<double> u = {1, -1, 1, 1, -1, -1, 1, -1};
  CHECK(continuous_process_sup(t, u) == doctest::Approx(0.17262055165077653).epsilon(1e-10));
}

TEST_CASE("projection tables agree with the direct dense transcription") {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    const Fit a = fit(oracle::random_fixture(seed, 30 + seed, false), 0.25);
    const auto gw = quantile_grid(a.late.w_hat, 6), gx = quantile_grid(a.s.covariate, 5);
    const InfluenceTableC t = influence_continuous(a.s, a.late, gw, gx, gaussian(), 0.25);
    const auto fast = reference::dense_influence(t);
    const auto slow = reference::dense_projection_direct(a.s, a.late, gw, gx, gaussian(), 0.25);
    REQUIRE(fast.values.size() == slow.values.size());
    for (std::size_t k = 0; k < fast.values.size(); ++k)
      CHECK(fast.values[k] == doctest::Approx(slow.values[k]).epsilon(1e-9).scale(1e-3));

    RandomStream rs(seed);
    std::vector<double> u(a.s.size());
    draw_multipliers(MultiplierKind::StandardNormal, rs, u);
    const auto process = continuous_process(t, u);
    for (std::size_t r = 0; r < slow.rows; ++r) {
      double v = 0.0;
      for (std::size_t i = 0; i < slow.cols; ++i) v += u[i] * slow.at(r, i);
      CHECK(process[r] == doctest::Approx(v / std::sqrt(static_cast<double>(slow.cols))).epsilon(1e-9).scale(1e-3));
    }
  }
}

TEST_CASE("plug-in tables agree with the direct transcription") {
  for (std::uint64_t seed = 30; seed < 34; ++seed) {
    const Fit a = fit(oracle::random_fixture(seed, 35, false), 0.25);
    const auto gw = quantile_grid(a.late.w_hat, 6), gx = quantile_grid(a.s.covariate, 5);
    const InfluenceTableC fast =
        influence_continuous(a.s, a.late, gw, gx, gaussian(), 0.25, form(InfluenceForm::PlugIn));
    const InfluenceTableC slow = reference::influence_continuous_direct(a.s, a.late, gw, gx, gaussian(), 0.25);
    for (std::size_t k = 0; k < fast.psi_core.size(); ++k) {
      CHECK(fast.psi_core[k] == doctest::Approx(slow.psi_core[k]).epsilon(1e-10).scale(1e-3));
      CHECK(fast.phi_core[k] == doctest::Approx(slow.phi_core[k]).epsilon(1e-10).scale(1e-3));
      CHECK(fast.primitive[k] == doctest::Approx(slow.primitive[k]).epsilon(1e-10).scale(1e-3));
      CHECK(fast.kappa[k] == doctest::Approx(slow.kappa[k]).epsilon(1e-10).scale(1e-3));
    }
    const auto df = reference::dense_influence(fast), ds = reference::dense_influence(slow);
    for (std::size_t k = 0; k < df.values.size(); ++k)
      CHECK(df.values[k] == doctest::Approx(ds.values[k]).epsilon(1e-10).scale(1e-3));
  }
}

TEST_CASE("plug-in entries vanish above the covariate cut") {
  const Fit a = fit(oracle::random_fixture(40, 40, false), 0.25);
  const auto gw = quantile_grid(a.late.w_hat, 5), gx = quantile_grid(a.s.covariate, 4);
  const InfluenceTableC t = influence_continuous(a.s, a.late, gw, gx, gaussian(), 0.25, form(InfluenceForm::PlugIn));
  for (std::size_t i = 0; i < a.s.size(); ++i)
    for (std::size_t g = 0; g < gx.size(); ++g)
      if (a.s.covariate[i] > gx[g]) {
        CHECK(t.psi(2, g, i) == 0.0);
        CHECK(t.phi(2, g, i) == 0.0);
      }
}

TEST_CASE("influence rows sum to zero in both forms") {
  const Fit a = fit(oracle::random_fixture(41, 45, false), 0.25);
  const auto gw = quantile_grid(a.late.w_hat, 5), gx = quantile_grid(a.s.covariate, 4);
  for (auto f : {InfluenceForm::Projection, InfluenceForm::PlugIn}) {
    const auto d = reference::dense_influence(influence_continuous(a.s, a.late, gw, gx, gaussian(), 0.25, form(f)));
    for (std::size_t r = 0; r < d.rows; ++r) {
      double sum = 0.0;
      for (std::size_t i = 0; i < d.cols; ++i) sum += d.at(r, i);
      CHECK(std::abs(sum) < 1e-10);
    }
  }
}

TEST_CASE("fast bootstrap matches the dense serial reference in both forms") {
  const Fit a = fit(oracle::random_fixture(42, 50, false), 0.25);
  const auto gw = quantile_grid(a.late.w_hat, 6), gx = quantile_grid(a.s.covariate, 5);
  TestConfig c;
  c.n_bootstrap = 40;
  c.seed = 3;
  for (auto f : {InfluenceForm::Projection, InfluenceForm::PlugIn}) {
    const InfluenceTableC t = influence_continuous(a.s, a.late, gw, gx, gaussian(), 0.25, form(f));
    const auto fast = bootstrap_continuous(t, c, 0.5);
    const auto slow = reference::dense_bootstrap(reference::dense_influence(t), 40, c.multiplier, 3);
    for (std::size_t b = 0; b < slow.size(); ++b) CHECK(fast.draws[b] == doctest::Approx(slow[b]).epsilon(1e-10));
  }
}

TEST_CASE("smoother cache does not change the draws") {
  const Fit a = fit(oracle::random_fixture(43, 60, false), 0.25);
  const auto gw = quantile_grid(a.late.w_hat, 6), gx = quantile_grid(a.s.covariate, 5);
  InfluenceOptions cached, uncached;
  uncached.max_cached_rows = 0;
  const auto t1 = influence_continuous(a.s, a.late, gw, gx, gaussian(), 0.25, cached);
  const auto t2 = influence_continuous(a.s, a.late, gw, gx, gaussian(), 0.25, uncached);
  CHECK_FALSE(t1.smoother.empty());
  CHECK(t2.smoother.empty());
  TestConfig c;
  c.n_bootstrap = 30;
  CHECK(bootstrap_continuous(t1, c, 0.0).draws == bootstrap_continuous(t2, c, 0.0).draws);
}

TEST_CASE("derivative of the primitive is the weighted CDF") {
  const Sample s = simulate({1.0, 0.7, 0.5, 200, CovariateKind::Continuous, 8});
  const double h = bandwidth(BandwidthRule::monte_carlo(), 1.0, s.covariate, s.size());
  const LateFit late = late_continuous(s, h, gaussian());
  const auto grid = equal_grid(late.w_hat, 200);
  for (double x : {0.25, 0.5, 0.75})
    for (int z : {0, 1}) {
      const PrimitiveCheck pc = primitive_consistency_check(s, late, x, z, grid, h, gaussian());
      CAPTURE(x);
      CHECK(pc.max_deviation < 2.0 * pc.step);
      for (std::size_t g = 1; g < grid.size(); ++g) CHECK(pc.primitive[g] >= pc.primitive[g - 1]);
    }
}

TEST_CASE("continuous pipeline is bit-identical across thread counts") {
  const Sample s = simulate({0.5, 0.7, 0.5, 400, CovariateKind::Continuous, 4});
  TestConfig c;
  c.n_bootstrap = 50;
  c.seed = 2;
  for (auto f : {InfluenceForm::Projection, InfluenceForm::PlugIn}) {
    c.influence_form = f;
    omp_set_num_threads(1);
    const TestReport a = run_test(s, c);
    omp_set_num_threads(3);
    const TestReport b = run_test(s, c);
    omp_set_num_threads(omp_get_num_procs());
    CHECK(a.statistic == b.statistic);
    CHECK(a.bootstrap_draws == b.bootstrap_draws);
  }
}

TEST_CASE("continuous report carries boundary diagnostics") {
  const Sample s = simulate({1.0, 0.7, 0.5, 300, CovariateKind::Continuous, 6});
  TestConfig c;
  c.n_bootstrap = 20;
  const TestReport r = run_test(s, c);
  CHECK(r.mode == TestMode::Continuous);
  CHECK(r.diagnostics.count("boundary_points") == 1);
  CHECK(r.grid_x_used.size() == 15);
  CHECK(r.p_value > 0.0);
  CHECK(r.p_value <= 1.0);
}
