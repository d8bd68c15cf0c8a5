#include "budget/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace budget {

Division::Division(std::vector<Rational> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidDivision("division must have at least one weight", 0);
  Rational sum = 0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    weights_[j].canonicalize();
    if (weights_[j] < 0 || weights_[j] > 1) {
      throw InvalidDivision("weight " + std::to_string(j) + " = " + to_fraction(weights_[j]) +
                                " is outside [0,1]",
                            0);
    }
    sum += weights_[j];
  }
  if (sum != 1) {
    throw InvalidDivision("weights sum to " + to_fraction(sum) + ", not 1", sum);
  }
}

Division Division::unit(std::size_t m, std::size_t j) {
  std::vector<Rational> w(m, Rational(0));
  w.at(j) = 1;
  return Division(std::move(w));
}

Division Division::uniform(std::size_t m) {
  return Division(std::vector<Rational>(m, make_rational(1, static_cast<long>(m))));
}

std::vector<double> Division::to_doubles() const {
  std::vector<double> out;
  out.reserve(weights_.size());
  for (const auto& w : weights_) out.push_back(w.get_d());
  return out;
}

std::string to_string(const Division& d) {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (j) os << ", ";
    os << to_fraction(d[j]);
  }
  os << ')';
  return os.str();
}

Profile::Profile(std::vector<Division> reports) : reports_(std::move(reports)) {
  if (reports_.empty()) throw InputError("profile needs at least one voter");
  const std::size_t m = reports_.front().size();
  if (m < 2) throw InputError("profile needs at least two alternatives");
  for (std::size_t i = 1; i < reports_.size(); ++i) {
    if (reports_[i].size() != m) {
      throw DimensionError("voter " + std::to_string(i) + " reports " +
                           std::to_string(reports_[i].size()) + " weights, expected " +
                           std::to_string(m));
    }
  }
}

std::vector<Rational> Profile::column(std::size_t j) const {
  std::vector<Rational> col;
  col.reserve(reports_.size());
  for (const auto& r : reports_) col.push_back(r[j]);
  return col;
}

Profile Profile::without(std::size_t i) const {
  if (reports_.size() < 2) throw InputError("cannot remove the only voter");
  std::vector<Division> rest = reports_;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
  return Profile(std::move(rest));
}

Profile Profile::with_report(std::size_t i, Division report) const {
  std::vector<Division> next = reports_;
  next.at(i) = std::move(report);
  return Profile(std::move(next));
}

Profile Profile::appended(Division report) const {
  std::vector<Division> next = reports_;
  next.push_back(std::move(report));
  return Profile(std::move(next));
}

Profile Profile::concat(const Profile& other) const {
  std::vector<Division> next = reports_;
  next.insert(next.end(), other.reports_.begin(), other.reports_.end());
  return Profile(std::move(next));
}

Profile Profile::permute_voters(std::span<const std::size_t> order) const {
  if (order.size() != reports_.size()) throw DimensionError("voter permutation has wrong length");
  std::vector<Division> next;
  next.reserve(order.size());
  for (std::size_t k : order) next.push_back(reports_.at(k));
  return Profile(std::move(next));
}

Profile Profile::permute_alternatives(std::span<const std::size_t> order) const {
  std::vector<Division> next;
  next.reserve(reports_.size());
  for (const auto& r : reports_) next.push_back(permute(r, order));
  return Profile(std::move(next));
}

Division permute(const Division& d, std::span<const std::size_t> order) {
  if (order.size() != d.size()) throw DimensionError("alternative permutation has wrong length");
  std::vector<Rational> w;
  w.reserve(order.size());
  for (std::size_t j : order) w.push_back(d[j]);
  return Division(std::move(w));
}

OrderStatistics::OrderStatistics(const Profile& profile) : n_(profile.voters()) {
  columns_.reserve(profile.alternatives());
  for (std::size_t j = 0; j < profile.alternatives(); ++j) {
    auto col = profile.column(j);
    std::stable_sort(col.begin(), col.end(), std::greater<Rational>());
    columns_.push_back(std::move(col));
  }
}

Rational OrderStatistics::at(std::size_t rank, std::size_t j) const {
  if (rank == 0) return 1;
  if (rank == n_ + 1) return 0;
  return columns_.at(j).at(rank - 1);
}

Rational OrderStatistics::rank_sum(std::size_t rank) const {
  Rational s = 0;
  for (std::size_t j = 0; j < columns_.size(); ++j) s += at(rank, j);
  return s;
}

OrderStatistics order_statistics(const Profile& profile) { return OrderStatistics(profile); }

Rational l1_distance(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) {
    throw DimensionError("l1_distance: dimensions " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
  }
  Rational d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d += abs_diff(a[j], b[j]);
  return d;
}

Rational l1_distance(const Division& a, const Division& b) {
  return l1_distance(a.weights(), b.weights());
}

Rational social_cost(const Profile& profile, const Division& q) {
  if (q.size() != profile.alternatives()) throw DimensionError("social_cost: dimension mismatch");
  Rational cost = 0;
  for (const auto& r : profile.reports()) cost += l1_distance(r, q);
  return cost;
}

double shannon_entropy(const Division& q) {
  double h = 0.0;
  for (const auto& w : q.weights()) {
    double x = w.get_d();
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

Rational median_of(std::vector<Rational> values) {
  if (values.size() % 2 == 0) throw InputError("median_of requires an odd number of values");
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace budget
