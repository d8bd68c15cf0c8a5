#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "budget/game.hpp"
#include "budget/generate.hpp"
#include "budget/market.hpp"
#include "budget/mechanisms.hpp"
#include "support.hpp"

using namespace budget;
using namespace fixture;

namespace {

SpendingProfile S(std::initializer_list<std::initializer_list<const char*>> rows) {
  std::vector<std::vector<Rational>> s;
  for (const auto& r : rows) {
    s.emplace_back();
    for (const char* x : r) s.back().push_back(R(x));
  }
  return SpendingProfile(std::move(s));
}

}  // namespace

TEST_CASE("spending validation") {
  CHECK_THROWS_AS(S({{"1.5", "0"}}), InputError);
  CHECK_THROWS_AS(S({{"-0.1", "0"}}), InputError);
  CHECK_THROWS(S({{"1", "0"}, {"1"}}));
  CHECK_THROWS_AS(game_outcome(S({{"0", "0"}, {"0", "0"}})), InputError);
}

TEST_CASE("game outcome") {
  const auto s = S({{"0", "1", "1"}, {"1", "1", "0"}, {"1", "0", "0"}});
  CHECK(s.column_sums() == std::vector<Rational>{2, 2, 1});
  CHECK(game_outcome(s) == D({"0.4", "0.4", "0.2"}));
  CHECK(game_outcome(S({{"0.2", "0.3", "0.5"}})) == D({"0.2", "0.3", "0.5"}));
  CHECK(game_outcome(S({{"0", "1", "0"}})) == D({"0", "1", "0"}));
}

TEST_CASE("equilibrium spending") {
  const auto eq = equilibrium_spending(three_voter());
  CHECK(eq.column_sums() == std::vector<Rational>{2, 2, 1});
  CHECK(eq == S({{"0", "1", "1"}, {"1", "1", "0"}, {"1", "0", "0"}}));

  const auto single = single_minded_profile({2, 1, 1});
  const auto s = equilibrium_spending(single);
  for (std::size_t i = 0; i < single.voters(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(s.at(i, j) == single[i][j]);
  }

  const auto x = D({"0.3", "0.3", "0.4"});
  CHECK(game_outcome(equilibrium_spending(Profile({x, x, x}))) == x);
}

TEST_CASE("improving deviations") {
  const auto p = three_voter();
  const auto eq = equilibrium_spending(p);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(satisfies_best_response_conditions(eq, p, i));
    CHECK_FALSE(find_improving_deviation(eq, p, i).has_value());
  }
  // Voter 1 buying more of alternative 1 only moves the outcome away.
  for (const char* extra : {"0.25", "0.5", "1"}) {
    const auto raised = eq.with_row(0, {R(extra), 1, 1});
    CHECK(l1_distance(game_outcome(raised), p[0]) > l1_distance(game_outcome(eq), p[0]));
  }
  const auto starved = eq.with_row(1, {0, 1, 0});
  CHECK_FALSE(satisfies_best_response_conditions(starved, p, 1));
  const auto dev = find_improving_deviation(starved, p, 1);
  REQUIRE(dev.has_value());
  CHECK(dev->kind == DeviationKind::RaiseUndervalued);
  CHECK(dev->alternative == 0);
  CHECK(dev->distance_after < dev->distance_before);
  CHECK(l1_distance(game_outcome(starved.with_row(1, dev->spending)), p[1]) == dev->distance_after);
}

TEST_CASE("best responses satisfy the structural conditions") {
  Rng rng(51);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 4), m = 2 + uniform_index(rng, 3);
    const auto p = random_profile(rng, n, m);
    std::vector<std::vector<Rational>> s(n, std::vector<Rational>(m));
    for (auto& row : s) {
      for (auto& x : row) x = make_rational(static_cast<long>(uniform_index(rng, 5)), 4);
    }
    s[0][0] = 1;
    const SpendingProfile spending(s);
    const std::size_t i = uniform_index(rng, n);
    const auto br = best_response(spending, p, i);
    const auto after = spending.with_row(i, br);
    CHECK(satisfies_best_response_conditions(after, p, i));
    CHECK(l1_distance(game_outcome(after), p[i]) <= l1_distance(game_outcome(spending), p[i]));
    CHECK_FALSE(find_improving_deviation(after, p, i).has_value());
  }
}

TEST_CASE("equilibrium spending is an equilibrium with the market outcome") {
  Rng rng(52);
  for (int trial = 0; trial < 150; ++trial) {
    const auto p = random_profile(rng, 1 + uniform_index(rng, 5), 2 + uniform_index(rng, 3));
    const auto eq = equilibrium_spending(p);
    CHECK(game_outcome(eq) == independent_markets(p));
    for (std::size_t i = 0; i < p.voters(); ++i) CHECK_FALSE(find_improving_deviation(eq, p, i).has_value());
  }
}

TEST_CASE("boundary spending can move without moving the outcome") {
  // Three voters on the price of alternative 1 share what the fourth leaves.
  const auto p = P({{"0.5", "0.5"}, {"0.5", "0.5"}, {"1", "0"}, {"0.5", "0.5"}});
  const auto eq = equilibrium_spending(p);
  REQUIRE(independent_markets(p) == D({"0.5", "0.5"}));
  REQUIRE(eq.at(0, 0) == R("2/3"));
  const auto shifted = eq.with_row(0, {R("1/3"), 1}).with_row(1, {1, 1});
  CHECK(shifted.column_sums() == eq.column_sums());
  CHECK_FALSE(shifted == eq);
  CHECK(game_outcome(shifted) == game_outcome(eq));

  Rng rng(53);
  int perturbed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto q = random_profile(rng, 2 + uniform_index(rng, 4), 2 + uniform_index(rng, 2), 4);
    const auto s = equilibrium_spending(q);
    const auto prices = independent_markets(q);
    for (std::size_t j = 0; j < q.alternatives(); ++j) {
      std::vector<std::size_t> boundary;
      for (std::size_t i = 0; i < q.voters(); ++i) {
        if (q[i][j] == prices[j]) boundary.push_back(i);
      }
      if (boundary.size() < 2) continue;
      const auto a = boundary[0], b = boundary[1];
      const Rational room = std::min(Rational(1 - s.at(a, j)), Rational(s.at(b, j)));
      if (room == 0) continue;
      auto ra = s.row(a), rb = s.row(b);
      ra[j] += room / 2;
      rb[j] -= room / 2;
      const auto moved = s.with_row(a, ra).with_row(b, rb);
      CHECK(moved.column_sums() == s.column_sums());
      CHECK(game_outcome(moved) == prices);
      ++perturbed;
    }
  }
  CHECK(perturbed > 0);
}

TEST_CASE("dynamics reach only the market outcome") {
  const auto ex = verify_unique_equilibrium_outcome(three_voter(), 20, 5);
  CHECK(ex.trials == 20);
  CHECK(ex.converged > 0);
  CHECK(ex.mismatched == 0);
  CHECK(ex.expected == D({"0.4", "0.4", "0.2"}));
  for (const auto& d : ex.distinct_outcomes) CHECK(d == ex.expected);

  const auto single = verify_unique_equilibrium_outcome(single_minded_profile({3, 2, 1}), 20, 6);
  CHECK(single.mismatched == 0);
  CHECK(single.converged == single.trials);
  CHECK(single.expected == D({"1/2", "1/3", "1/6"}));

  const auto lone = verify_unique_equilibrium_outcome(P({{"0.2", "0.3", "0.5"}}), 10, 7);
  CHECK(lone.mismatched == 0);
  CHECK(lone.expected == D({"0.2", "0.3", "0.5"}));
}

TEST_CASE("slowly converging dynamics are closed exactly") {
  // Two boundary voters keep undercutting each other; plain rounds never stop.
  const auto p = P({{"1/5", "7/10", "1/10"}, {"7/20", "11/20", "1/10"}, {"13/20", "1/4", "1/10"}});
  const auto report = verify_unique_equilibrium_outcome(p, 20, 11, 400);
  CHECK(report.mismatched == 0);
  CHECK(report.extrapolated > 0);
  CHECK(report.converged + report.not_converged == 20);
  REQUIRE(report.distinct_outcomes.size() == 1);
  CHECK(report.distinct_outcomes.front() == D({"7/20", "11/20", "1/10"}));
}
