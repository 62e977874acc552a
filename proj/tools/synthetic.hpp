#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "hette/core.hpp"

namespace hette::tools {

// Synthetic stand-ins for the two applications.
//   jtpa:   earnings, program participation, randomized eligibility offer,
//           one coded covariate with 4 levels (collapsed demographic dummies).
//   census: weekly hours, more than two children, twin second birth,
//           mother's age as a continuous covariate.
// Both have an effect that varies with the selection unobservable.
Sample synthetic_jtpa(std::size_t n, std::uint64_t seed);
Sample synthetic_census(std::size_t n, std::uint64_t seed);

// Dispatch on "jtpa", "census", "null-discrete", "null-continuous",
// "alt-discrete", "alt-continuous"; throws InputError otherwise.
Sample synthetic(const std::string& shape, std::size_t n, std::uint64_t seed);

}  // namespace hette::tools
