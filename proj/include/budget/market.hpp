#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "budget/core.hpp"

namespace budget {

/// A nonnegative rational or +infinity. Arithmetic on it is deliberately
/// not provided.
class ExtendedRational {
 public:
  static ExtendedRational infinity() { return ExtendedRational(); }
  static ExtendedRational finite(Rational value) { return ExtendedRational(std::move(value)); }

  bool is_infinite() const { return !value_.has_value(); }
  /// Throws std::logic_error when infinite.
  const Rational& value() const;

  bool operator==(const ExtendedRational& other) const { return value_ == other.value_; }

 private:
  ExtendedRational() = default;
  explicit ExtendedRational(Rational v) : value_(std::move(v)) {}
  std::optional<Rational> value_;
};

/// One good of supply x sold to voters with unit budgets and per-unit values.
struct MarketInstance {
  Rational supply;
  std::vector<Rational> values;
};

/// Demand of a unit-budget buyer with per-unit value v at the given price.
ExtendedRational demand(const Rational& value, const Rational& price);

/// sup{price : total demand > supply}, or 0 when no positive price has
/// positive demand. Throws InputError for zero supply.
Rational clearing_price(const MarketInstance& market);

/// med(0, 1/x, ..., n/x, v_1, ..., v_n).
Rational market_median(const MarketInstance& market);

struct MarketClearing {
  Rational supply;  // x*
  Division prices;
};

/// Finds the common supply x* at which the independent per-alternative
/// clearing prices sum to 1 (the largest such x when there are several).
MarketClearing im_via_markets(const Profile& profile);

/// Clearing prices of every alternative's market at a common supply.
std::vector<Rational> clearing_prices(const Profile& profile, const Rational& supply);

/// Rationality certificate for a claimed independent markets outcome.
///
/// demanders[j] holds the voters with outcome_j < report_{i,j}; boundary[j]
/// those with outcome_j == report_{i,j}. A valid certificate has a z > 0 with
///   |demanders_j| z <= p_j <= (|demanders_j| + |boundary_j|) z
/// for every alternative, which reduces to p_j = z |demanders_j| whenever no
/// boundary voter needs to buy. z = 1/x is the reciprocal supply.
struct DemanderSets {
  std::vector<std::vector<std::size_t>> demanders;
  std::vector<std::vector<std::size_t>> boundary;
  Rational z;
  Rational epsilon;  // min_{j, i in N_j} (report_{i,j} - p_j); 1 when no N_j is nonempty
  bool exact_equality = false;  // p_j == z |N_j| for all j
  bool uses_boundary = false;   // some boundary voter must spend
};

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws CertificateError when the outcome admits no certificate.
DemanderSets verify_lp_certificate(const Profile& profile, const Division& outcome);

}  // namespace budget
