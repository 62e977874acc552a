#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <omp.h>

#include "hette/core.hpp"
#include "hette/rng.hpp"

namespace hette {

struct BootstrapResult {
  std::vector<double> draws;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

BootstrapResult summarize_bootstrap(std::vector<double> draws, double statistic, double alpha);

/// Seed of the multiplier stream for bootstrap draw `draw`.
inline std::uint64_t multiplier_seed(std::uint64_t seed, std::size_t draw) {
  return derive_seed({seed, 0x6d756c7469ULL, static_cast<std::uint64_t>(draw)});
}

/// Evaluates `sup_of(U)` for B multiplier vectors of length n. Draw b always
/// reads its own stream, and each draw is computed by one thread, so the
/// result is bit-identical for any thread count.
template <class SupFn>
std::vector<double> multiplier_draws(std::size_t n, int n_bootstrap, MultiplierKind kind,
                                     std::uint64_t seed, SupFn&& sup_of) {
  std::vector<double> draws(static_cast<std::size_t>(n_bootstrap));
#pragma omp parallel
  {
    std::vector<double> u(n);
#pragma omp for schedule(static)
    for (int b = 0; b < n_bootstrap; ++b) {
      RandomStream stream(multiplier_seed(seed, static_cast<std::size_t>(b)));
      draw_multipliers(kind, stream, u);
      draws[static_cast<std::size_t>(b)] = sup_of(std::span<const double>(u));
    }
  }
  return draws;
}

}  // namespace hette
