#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "budget/core.hpp"
#include "budget/mechanisms.hpp"

namespace budget {

enum class Verdict {
  Holds,     // no counterexample on the tested instances
  Violated,  // counterexample attached
  Vacuous,   // premise not met; nothing was tested
};

std::string_view to_string(Verdict v);

enum class Axiom {
  IncentiveCompatibility,
  ParetoOptimality,
  Proportionality,
  Monotonicity,
  Participation,
  Reinforcement,
  RangeRespecting,
  Anonymity,
  Neutrality,
};

std::string_view to_string(Axiom a);

/// Everything needed to recompute a violation from scratch.
///
///   IncentiveCompatibility  modified = P with voter's misreport; before/after
///                           = voter distance to M(profile) / M(modified)
///   Monotonicity            modified = P with p'_i; before/after = outcome_j
///   Participation           modified = P without voter; before/after =
///                           voter distance to M(profile) / M(modified)
///   Reinforcement           other = R, modified = P u R; after = distance
///                           between M(P u R) and M(P)
///   RangeRespecting         before/after = violated bound / outcome_j
///   Anonymity, Neutrality   modified = permuted profile, permutation set;
///                           after = distance between the two outcomes
///   ParetoOptimality        witness = dominating division
///   Proportionality         witness = n_j/n division; after = distance
struct Counterexample {
  Profile profile;
  std::optional<Profile> modified;
  std::optional<Profile> other;
  std::size_t voter = 0;
  std::size_t alternative = 0;
  std::vector<std::size_t> permutation;
  Division outcome;
  std::optional<Division> witness;
  Rational before;
  Rational after;
};

struct AxiomReport {
  Axiom axiom = Axiom::IncentiveCompatibility;
  std::string mechanism;
  Verdict verdict = Verdict::Holds;
  std::optional<Counterexample> counterexample;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string established;  // what a Holds verdict actually covers
};

/// Recomputes the stored counterexample with the mechanism and confirms the
/// violation is real. Reports without a counterexample return false.
bool reverify(const AxiomReport& report, const Mechanism& mechanism);

/// Divisions whose coordinates are multiples of 1/resolution.
struct GridSpec {
  long resolution = 20;
  std::size_t dimension = 3;
  std::size_t cap = 200000;

  /// Number of lattice divisions, C(d+m-1, m-1).
  mpz_class count() const;
};

/// Visits every lattice division in lexicographic order. Throws InputError
/// when the grid exceeds its cap.
void for_each_lattice_division(const GridSpec& grid, const std::function<void(const Division&)>& visit);

enum class MisreportStrategy { Structured, Random, Mixed };

/// Unit vectors, pairwise coordinate swaps, and mass shifts of 1/10, 1/4 and
/// 1/2 between every ordered pair of coordinates (clipped to feasibility).
/// The truthful report itself is excluded.
std::vector<Division> structured_misreports(const Division& truth);

AxiomReport check_incentive_compatibility(const Mechanism& mechanism, const Profile& profile,
                                          MisreportStrategy strategy, std::size_t trials,
                                          std::uint64_t seed);

/// Every voter against every structured misreport.
AxiomReport check_incentive_compatibility_structured(const Mechanism& mechanism,
                                                     const Profile& profile);

/// All lattice divisions that Pareto-dominate the outcome.
std::vector<Division> pareto_improvements(const Profile& profile, const Division& outcome,
                                          const GridSpec& grid);

/// Grid search for a dominating division. A Holds verdict is one-sided unless
/// the outcome also lies in the welfare band, which certifies optimality.
AxiomReport check_pareto(const Profile& profile, const Division& outcome, const GridSpec& grid,
                         std::string mechanism = {});

AxiomReport check_proportionality(const Mechanism& mechanism,
                                  const std::vector<std::size_t>& voter_counts);

/// Throws InputError unless p_j > p'_j and p_k <= p'_k for every k != j.
AxiomReport check_monotonicity(const Mechanism& mechanism, const Profile& profile,
                               std::size_t voter, std::size_t alternative, const Division& report,
                               const Division& shifted);

/// Random conforming pairs built by moving mass off one coordinate of a
/// voter's report onto the others.
AxiomReport check_monotonicity(const Mechanism& mechanism, const Profile& profile,
                               std::size_t trials, std::uint64_t seed);

AxiomReport check_participation(const Mechanism& mechanism, const Profile& profile,
                                std::size_t voter);

/// Vacuous when M(P) != M(R).
AxiomReport check_reinforcement(const Mechanism& mechanism, const Profile& first,
                                const Profile& second);

AxiomReport check_range_respecting(const Mechanism& mechanism, const Profile& profile);

struct SymmetryReport {
  AxiomReport anonymity;
  AxiomReport neutrality;
};

SymmetryReport check_symmetries(const Mechanism& mechanism, const Profile& profile,
                                std::size_t permutations, std::uint64_t seed);

/// Exact social-cost minimizers over the lattice.
std::vector<Division> brute_force_welfare_oracle(const Profile& profile, const GridSpec& grid);

}  // namespace budget
