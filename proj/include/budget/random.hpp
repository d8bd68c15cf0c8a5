#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "budget/core.hpp"

namespace budget {

// Seeded generator helpers. Bounded draws use plain modulo so streams are
// identical across standard library implementations.
using Rng = std::mt19937_64;

inline std::size_t uniform_index(Rng& rng, std::size_t bound) {
  return static_cast<std::size_t>(rng() % bound);
}

/// Uniformly random composition of d into m parts, as a division on the
/// 1/d lattice.
Division random_lattice_division(Rng& rng, std::size_t m, long d);

/// A uniformly random permutation of 0..n-1.
std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n);

}  // namespace budget
