#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "budget/core.hpp"
#include "budget/random.hpp"

namespace budget {

enum class ProfileKind {
  SingleMinded,   // every voter reports a random unit vector
  DirichletLike,  // random compositions on the 1/d lattice
  Polarized,      // ceil(n/2) voters at e_1, the rest at e_2
};

ProfileKind parse_profile_kind(std::string_view name);
std::string_view to_string(ProfileKind kind);

/// Deterministic stream of random profiles.
class ProfileGenerator {
 public:
  ProfileGenerator(ProfileKind kind, std::size_t n, std::size_t m, std::uint64_t seed,
                   long lattice = 20);

  Profile next();

 private:
  ProfileKind kind_;
  std::size_t n_;
  std::size_t m_;
  long lattice_;
  Rng rng_;
};

std::vector<Profile> generate_profiles(ProfileKind kind, std::size_t n, std::size_t m,
                                       std::uint64_t seed, std::size_t count, long lattice = 20);

/// Single-minded profile with counts[j] voters reporting e_j, grouped by
/// alternative in index order.
Profile single_minded_profile(const std::vector<std::size_t>& counts);

}  // namespace budget
