#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "budget/core.hpp"

namespace budget {

/// Credits s_{i,j} in [0,1] that voter i places on alternative j.
class SpendingProfile {
 public:
  explicit SpendingProfile(std::vector<std::vector<Rational>> spend);

  std::size_t voters() const { return spend_.size(); }
  std::size_t alternatives() const { return spend_.front().size(); }
  const Rational& at(std::size_t i, std::size_t j) const { return spend_[i][j]; }
  const std::vector<Rational>& row(std::size_t i) const { return spend_[i]; }

  SpendingProfile with_row(std::size_t i, std::vector<Rational> row) const;
  std::vector<Rational> column_sums() const;
  Rational total() const;

  bool operator==(const SpendingProfile& other) const { return spend_ == other.spend_; }

 private:
  std::vector<std::vector<Rational>> spend_;
};

/// Outcome proportional to the credits on each alternative. Throws
/// InputError when nobody spends anything.
Division game_outcome(const SpendingProfile& spending);

/// Spending read off the clearing markets: full spend above the price,
/// none below, and an equal split of the remaining money among voters
/// whose report equals the price.
SpendingProfile equilibrium_spending(const Profile& profile);

enum class DeviationKind {
  RaiseUndervalued,  // q_j < p_{i,j} with s_{i,j} < 1
  LowerOvervalued,   // q_j > p_{i,j} with s_{i,j} > 0
  Probe,             // found by the finite candidate search
};

struct Deviation {
  std::size_t voter = 0;
  std::size_t alternative = 0;  // meaningful for the two structural kinds
  DeviationKind kind = DeviationKind::Probe;
  std::vector<Rational> spending;
  Rational distance_before;
  Rational distance_after;
};

/// The structural best-response conditions for voter i:
/// q_j < p_{i,j} implies s_{i,j} = 1 and q_j > p_{i,j} implies s_{i,j} = 0.
bool satisfies_best_response_conditions(const SpendingProfile& spending, const Profile& profile,
                                        std::size_t voter);

/// Returns a strictly improving unilateral change for voter i, or nothing.
std::optional<Deviation> find_improving_deviation(const SpendingProfile& spending,
                                                  const Profile& profile, std::size_t voter);

/// An exact best response of voter i to everyone else's spending.
std::vector<Rational> best_response(const SpendingProfile& spending, const Profile& profile,
                                    std::size_t voter);

struct EquilibriumReport {
  std::size_t trials = 0;
  std::size_t converged = 0;
  std::size_t not_converged = 0;
  std::size_t mismatched = 0;  // converged to something other than `expected`
  Division expected;
  std::vector<Division> distinct_outcomes;  // among converged runs
  std::size_t max_rounds = 0;
  std::size_t extrapolated = 0;  // converged runs closed by the pattern solve
};

/// Runs best-response dynamics from random starting spends and compares every
/// converged outcome with the independent markets division. Runs that only
/// approach their limit geometrically are closed exactly once the 0/interior/1
/// pattern of spends repeats; the jump is kept only if it passes the same checks.
EquilibriumReport verify_unique_equilibrium_outcome(const Profile& profile, std::size_t trials,
                                                    std::uint64_t seed,
                                                    std::size_t round_cap = 10000);

}  // namespace budget
