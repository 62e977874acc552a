#include "synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "hette/montecarlo.hpp"
#include "hette/rng.hpp"

namespace hette::tools {

Sample synthetic_jtpa(std::size_t n, std::uint64_t seed) {
  RandomStream rng(derive_seed({seed, 0x6a747061}));
  Sample s;
  s.covariate_kind = CovariateKind::Discrete;
  for (std::size_t i = 0; i < n; ++i) {
    const double group = 1.0 + std::floor(4.0 * rng.uniform());
    const int z = rng.uniform() < 2.0 / 3.0 ? 1 : 0;
    const double v = rng.normal();    // taste for training
    const double e = rng.normal();
    const double take = normal_cdf(0.3 + 0.8 * v);
    const int d = z == 1 ? (rng.uniform() < take ? 1 : 0) : (rng.uniform() < 0.02 ? 1 : 0);
    const double effect = 1500.0 + 1200.0 * v;
    const double base = 9000.0 + 2500.0 * group + 6000.0 * (0.6 * v + 0.8 * e);
    s.covariate.push_back(group);
    s.instrument.push_back(z);
    s.treatment.push_back(d);
    s.outcome.push_back(std::round(std::max(0.0, base + d * effect)));
  }
  return s;
}

Sample synthetic_census(std::size_t n, std::uint64_t seed) {
  RandomStream rng(derive_seed({seed, 0x63656e73}));
  Sample s;
  s.covariate_kind = CovariateKind::Continuous;
  for (std::size_t i = 0; i < n; ++i) {
    const double age = 21.0 + 14.0 * rng.uniform();
    const int z = rng.uniform() < 0.1 ? 1 : 0;
    const double v = rng.normal();
    const double e = rng.normal();
    const double p0 = normal_cdf(-0.6 + 0.05 * (age - 21.0) + 0.7 * v);
    const int d = z == 1 ? 1 : (rng.uniform() < p0 ? 1 : 0);
    const double effect = -6.0 - 3.0 * v;
    const double hours = 18.0 + 0.4 * (age - 21.0) + 10.0 * (0.5 * v + 0.85 * e) + d * effect;
    s.covariate.push_back(std::round(age * 100.0) / 100.0);
    s.instrument.push_back(z);
    s.treatment.push_back(d);
    s.outcome.push_back(std::round(std::max(0.0, hours) * 10.0) / 10.0);
  }
  return s;
}

Sample synthetic(const std::string& shape, std::size_t n, std::uint64_t seed) {
  if (shape == "jtpa") return synthetic_jtpa(n, seed);
  if (shape == "census") return synthetic_census(n, seed);
  DgpSpec spec;
  spec.n = n;
  spec.seed = seed;
  if (shape == "null-discrete" || shape == "alt-discrete") {
    spec.covariate_kind = CovariateKind::Discrete;
  } else if (shape == "null-continuous" || shape == "alt-continuous") {
    spec.covariate_kind = CovariateKind::Continuous;
  } else {
    throw InputError("unknown dataset shape '" + shape + "'");
  }
  spec.gamma = shape.rfind("alt", 0) == 0 ? 0.5 : 1.0;
  return simulate(spec);
}

}  // namespace hette::tools
