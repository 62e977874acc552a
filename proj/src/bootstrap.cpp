#include "hette/bootstrap.hpp"

#include <utility>

namespace hette {

BootstrapResult summarize_bootstrap(std::vector<double> draws, double statistic, double alpha) {
  BootstrapResult out;
  out.p_value = bootstrap_p_value(draws, statistic);
  out.critical_value = bootstrap_critical_value(draws, alpha);
  out.reject = out.p_value <= alpha;
  out.draws = std::move(draws);
  return out;
}

}  // namespace hette
