#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "budget/rational.hpp"

namespace budget {

/// Raised when two objects that must share a dimension do not.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the Division constructor for vectors outside the simplex.
class InvalidDivision : public InputError {
 public:
  InvalidDivision(const std::string& what, Rational sum)
      : InputError(what), sum_(std::move(sum)) {}
  const Rational& sum() const { return sum_; }

 private:
  Rational sum_;
};

/// A budget division: m nonnegative rational weights summing to exactly 1.
/// Vectors that only approximately sum to 1 are rejected, never renormalized.
class Division {
 public:
  explicit Division(std::vector<Rational> weights);

  static Division unit(std::size_t m, std::size_t j);
  static Division uniform(std::size_t m);

  std::size_t size() const { return weights_.size(); }
  const Rational& operator[](std::size_t j) const { return weights_[j]; }
  std::span<const Rational> weights() const { return weights_; }
  std::vector<double> to_doubles() const;

  bool operator==(const Division& other) const { return weights_ == other.weights_; }

 private:
  std::vector<Rational> weights_;
};

std::string to_string(const Division& d);

/// An ordered list of n >= 1 voter reports over m >= 2 alternatives.
class Profile {
 public:
  explicit Profile(std::vector<Division> reports);

  std::size_t voters() const { return reports_.size(); }
  std::size_t alternatives() const { return reports_.front().size(); }
  const Division& operator[](std::size_t i) const { return reports_[i]; }
  std::span<const Division> reports() const { return reports_; }

  std::vector<Rational> column(std::size_t j) const;

  /// The profile with voter i removed; requires n >= 2.
  Profile without(std::size_t i) const;
  Profile with_report(std::size_t i, Division report) const;
  Profile appended(Division report) const;
  Profile concat(const Profile& other) const;
  /// Voter k of the result is voter order[k] of this profile.
  Profile permute_voters(std::span<const std::size_t> order) const;
  /// Alternative j of the result is alternative order[j] of this profile.
  Profile permute_alternatives(std::span<const std::size_t> order) const;

  bool operator==(const Profile& other) const { return reports_ == other.reports_; }

 private:
  std::vector<Division> reports_;
};

/// Applies an alternative relabeling to a division (result_j = d[order[j]]).
Division permute(const Division& d, std::span<const std::size_t> order);

/// Per-alternative report columns sorted in descending order.
class OrderStatistics {
 public:
  explicit OrderStatistics(const Profile& profile);

  std::size_t voters() const { return n_; }
  std::size_t alternatives() const { return columns_.size(); }
  /// rank is 1-based; rank 0 reads as 1 and rank n+1 reads as 0.
  Rational at(std::size_t rank, std::size_t j) const;
  /// Sum over alternatives of the rank-th largest report.
  Rational rank_sum(std::size_t rank) const;
  const std::vector<Rational>& column(std::size_t j) const { return columns_[j]; }

 private:
  std::size_t n_;
  std::vector<std::vector<Rational>> columns_;
};

OrderStatistics order_statistics(const Profile& profile);

Rational l1_distance(const Division& a, const Division& b);
Rational l1_distance(std::span<const Rational> a, std::span<const Rational> b);

/// Sum of voter distances to q. Social welfare is its negation.
Rational social_cost(const Profile& profile, const Division& q);

/// -sum q_j ln q_j with 0 ln 0 = 0, in nats. Only used for comparisons.
double shannon_entropy(const Division& q);

/// Exact median of an odd-length list.
Rational median_of(std::vector<Rational> values);

}  // namespace budget
