#include <cmath>

#include "doctest.h"
#include "hette/late.hpp"
#include "oracle.hpp"

using namespace hette;

namespace {

Sample tiny() {
  Sample s;
  s.outcome = {1, 2, 3, 4, 5, 6};
  s.instrument = {0, 0, 0, 1, 1, 1};
  s.treatment = {0, 0, 1, 0, 1, 1};
  s.covariate = {1, 1, 1, 1, 1, 1};
  return s;
}

Sample continuous_fixture() {
  Sample s;
  s.covariate = {0.1, 0.4, 0.35, 0.8, 0.55, 0.2, 0.9, 0.65};
  s.outcome = {1.0, 2.5, 0.3, 4.0, 2.2, 1.1, 3.3, 2.0};
  s.treatment = {0, 1, 0, 1, 1, 0, 1, 0};
  s.instrument = {0, 1, 0, 1, 1, 1, 0, 0};
  s.covariate_kind = CovariateKind::Continuous;
  return s;
}

}  // namespace

TEST_CASE("leave-one-out LATE on a single cell, exact fractions") {
  // sums over the other five rows, by hand
  const LateFit fit = late_discrete(tiny());
  const std::vector<double> delta = {15.0, 18.0, 21.0 / 4.0, 21.0 / 4.0, 18.0, 15.0};
  const std::vector<double> w = {16.0, 20.0, 3.0, 37.0 / 4.0, 5.0, 6.0};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(fit.delta_at_sample[i] == doctest::Approx(delta[i]).epsilon(1e-14));
    CHECK(fit.w_hat[i] == doctest::Approx(w[i]).epsilon(1e-14));
  }
  CHECK(wald_estimate(tiny()) == doctest::Approx(9.0));
}

TEST_CASE("treated rows keep their outcome") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Sample s = oracle::random_fixture(seed, 30, seed % 2 == 0);
    const LateFit fit = s.covariate_kind == CovariateKind::Discrete ? late_discrete(s)
                                                                      : late_continuous(s, 0.3, gaussian());
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.treatment[i] == 1) CHECK(fit.w_hat[i] == s.outcome[i]);
  }
}

TEST_CASE("leave-one-out continuous LATE, reference values") {
  // numpy transcription of the kernel-weighted ratio, h = 0.7
  const std::vector<double> expect = {1.5106621083109124, 1.8375737076091243, 0.828798183248049,
                                      0.47360500059797106, 2.0732344362372013, 1.6509877682150242,
                                      1.7460880122795048, 2.2001763215986117};
  const LateFit fit = late_continuous(continuous_fixture(), 0.7, gaussian());
  for (std::size_t i = 0; i < expect.size(); ++i)
    CHECK(fit.delta_at_sample[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("discrete LATE is constant in a cell under full-sample fits") {
  Sample s = oracle::random_fixture(5, 30, true);
  LateOptions o;
  o.leave_one_out = false;
  const LateFit fit = late_discrete(s, o);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s.covariate[i] == s.covariate[j]) CHECK(fit.delta_at_sample[i] == fit.delta_at_sample[j]);
}

TEST_CASE("weak first stage is reported") {
  Sample s = continuous_fixture();
  s.treatment = {1, 1, 1, 1, 1, 1, 1, 1};
  CHECK_THROWS_AS(late_continuous(s, 0.7, gaussian()), NumericalError);
}

TEST_CASE("evaluation at arbitrary points agrees with the full-sample fit") {
  const Sample s = continuous_fixture();
  const std::vector<double> pts = {0.2, 0.5};
  const auto d = late_continuous_at(s, pts, 0.7, gaussian());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    double s0 = 0, sy = 0, sz = 0, syz = 0, sd = 0, sdz = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double k = oracle::gauss((s.covariate[j] - pts[p]) / 0.7);
      s0 += k;
      sy += k * s.outcome[j];
      sz += k * s.instrument[j];
      syz += k * s.outcome[j] * s.instrument[j];
      sd += k * s.treatment[j];
      sdz += k * s.treatment[j] * s.instrument[j];
    }
    CHECK(d[p] == doctest::Approx((syz * s0 - sy * sz) / (sdz * s0 - sd * sz)).epsilon(1e-12));
  }
}

TEST_CASE("isotonic fit") {
  const std::vector<double> v = {0.1, 0.3, 0.2, 0.6, 0.5, 0.4, 0.9};
  const auto f = isotonic_fit(v);
  CHECK(std::is_sorted(f.begin(), f.end()));
  CHECK(f[1] == doctest::Approx(0.25));
  CHECK(f[3] == doctest::Approx(0.5));
  CHECK(f[6] == doctest::Approx(0.9));
  double a = 0, b = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    a += v[i];
    b += f[i];
  }
  CHECK(a == doctest::Approx(b));
}

TEST_CASE("complier distribution") {
  // all compliers: Z = D, so the complier CDF of Y(1) is the treated ECDF
  Sample s;
  s.outcome = {1, 2, 3, 4, 5, 6};
  s.instrument = {0, 0, 0, 1, 1, 1};
  s.treatment = {0, 0, 0, 1, 1, 1};
  s.covariate = {1, 1, 1, 1, 1, 1};
  const std::vector<double> t = {3.5, 4.5, 5.5, 6.5};
  const auto c = complier_cdf(s, 1, 1.0, t);
  CHECK(c.raw == std::vector<double>{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
  CHECK(c.max_decrease == 0.0);
  CHECK_THROWS_AS(complier_cdf(s, 1, 2.0, t), InputError);
  const auto c0 = complier_cdf(s, 0, 1.0, std::vector<double>{0.5, 1.5, 3.5});
  CHECK(c0.raw == std::vector<double>{0.0, 1.0 / 3.0, 1.0});
}

TEST_CASE("oracle equivalence over random small fixtures") {
  int compared = 0;
  for (std::uint64_t seed = 100; seed < 260; ++seed) {
    const bool discrete = seed % 2 == 0;
    const Sample s = oracle::random_fixture(seed, 12 + seed % 19, discrete);
    const auto ref = discrete ? oracle::delta_discrete(s) : oracle::delta_continuous(s, 0.25);
    bool finite = true;
    for (double d : ref) finite = finite && std::isfinite(d) && std::abs(d) < 1e8;
    if (!finite) continue;
    LateOptions o;
    o.max_floored_fraction = 1.0;
    const LateFit fit = discrete ? late_discrete(s, o) : late_continuous(s, 0.25, gaussian(), o);
    for (std::size_t i = 0; i < s.size(); ++i)
      CHECK(std::abs(fit.delta_at_sample[i] - ref[i]) <= 1e-10 * std::max(1.0, std::abs(ref[i])));
    ++compared;
  }
  CHECK(compared >= 100);
}
