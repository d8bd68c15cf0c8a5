#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "budget/core.hpp"
#include "support.hpp"

using namespace budget;
using namespace fixture;

TEST_CASE("rational parsing is exact") {
  CHECK(parse_rational("0.4") == make_rational(2, 5));
  CHECK(parse_rational("2/5") == make_rational(2, 5));
  CHECK(parse_rational("7") == 7);
  CHECK(parse_rational("-2.5e-3") == make_rational(-1, 400));
  CHECK(parse_rational(" 1/3 ") == make_rational(1, 3));
  CHECK(parse_rational("4/6") == make_rational(2, 3));
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational(""), InputError);
  CHECK_THROWS_AS(parse_rational("0.1.2"), InputError);
}

TEST_CASE("rational rendering") {
  CHECK(to_fraction(make_rational(2, 5)) == "2/5");
  CHECK(to_fraction(Rational(1)) == "1");
  CHECK(to_decimal(make_rational(2, 5)) == "0.4");
  CHECK(to_decimal(make_rational(1, 3)) == "0.333333333333");
  CHECK(median3(R("0.2"), R("0.9"), R("0.5")) == R("0.5"));
  CHECK(median3(R("1"), R("1"), R("0")) == 1);
}

TEST_CASE("division validation") {
  CHECK_NOTHROW(D({"1/3", "1/3", "1/3"}));
  try {
    D({"0.3", "0.3", "0.3"});
    FAIL("accepted a row summing to 9/10");
  } catch (const InvalidDivision& e) {
    CHECK(e.sum() == make_rational(9, 10));
    CHECK(std::string(e.what()).find("9/10") != std::string::npos);
  }
  CHECK_THROWS_AS(D({"1.5", "-0.5"}), InvalidDivision);
  CHECK_THROWS_AS(D({"0.333333", "0.333333", "0.333333"}), InvalidDivision);
  CHECK(Division::unit(3, 1) == D({"0", "1", "0"}));
  CHECK(Division::uniform(4) == D({"1/4", "1/4", "1/4", "1/4"}));
}

TEST_CASE("profile validation and editing") {
  CHECK_THROWS_AS(Profile({}), InputError);
  CHECK_THROWS(Profile({D({"1"})}));
  CHECK_THROWS_AS(Profile({D({"1", "0"}), D({"1", "0", "0"})}), DimensionError);

  const Profile p = three_voter();
  CHECK(p.voters() == 3);
  CHECK(p.alternatives() == 3);
  CHECK(p.without(0).voters() == 2);
  CHECK(p.without(0)[0] == p[1]);
  CHECK(p.with_report(2, D({"1", "0", "0"}))[2] == D({"1", "0", "0"}));
  CHECK(p.concat(p).voters() == 6);
  CHECK(p.appended(p[0]).voters() == 4);

  const std::vector<std::size_t> order{2, 0, 1};
  CHECK(p.permute_voters(order)[0] == p[2]);
  const auto swapped = p.permute_alternatives(order);
  CHECK(swapped[2] == D({"0.1", "0.9", "0"}));
  CHECK(permute(D({"0.9", "0", "0.1"}), order) == D({"0.1", "0.9", "0"}));
}

TEST_CASE("l1 distance") {
  CHECK(l1_distance(D({"0.4", "0.4", "0.2"}), D({"0", "0.5", "0.5"})) == R("0.8"));
  const auto x = D({"0.2", "0.3", "0.5"});
  CHECK(l1_distance(x, x) == 0);
  CHECK(l1_distance(D({"1", "0"}), D({"0", "1"})) == 2);
  CHECK_THROWS_AS(l1_distance(D({"1", "0"}), D({"1", "0", "0"})), DimensionError);
}

TEST_CASE("social cost") {
  const auto p = P({{"1", "0"}, {"0", "1"}});
  CHECK(social_cost(p, D({"0.5", "0.5"})) == 2);
  CHECK(social_cost(p, D({"1", "0"})) == 2);
  CHECK(social_cost(P({{"0.3", "0.7"}}), D({"0.3", "0.7"})) == 0);
  CHECK_THROWS_AS(social_cost(p, D({"1", "0", "0"})), DimensionError);
}

TEST_CASE("entropy") {
  CHECK(shannon_entropy(Division::uniform(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(shannon_entropy(D({"1", "0", "0"})) == 0.0);
  const double expected = -(2 * 0.45 * std::log(0.45) + 0.1 * std::log(0.1));
  CHECK(shannon_entropy(D({"0.45", "0.45", "0.1"})) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(shannon_entropy(D({"0.45", "0.45", "0.1"})) == doctest::Approx(0.948915).epsilon(1e-6));
}

TEST_CASE("order statistics") {
  const auto os = order_statistics(three_voter());
  CHECK(os.column(0) == std::vector<Rational>{R("0.9"), R("0.5"), R("0")});
  CHECK(os.column(1) == std::vector<Rational>{R("0.5"), R("0.5"), R("0")});
  CHECK(os.column(2) == std::vector<Rational>{R("0.5"), R("0.1"), R("0")});
  CHECK(os.at(0, 1) == 1);
  CHECK(os.at(4, 1) == 0);
  CHECK(os.at(2, 0) == R("0.5"));
  CHECK(os.rank_sum(1) == R("1.9"));
}

TEST_CASE("median of odd lists") {
  CHECK(median_of({R("3"), R("1"), R("2")}) == 2);
  CHECK_THROWS(median_of({R("1"), R("2")}));
}

TEST_CASE("distance is a metric on random divisions") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + uniform_index(rng, 4);
    const auto a = random_lattice_division(rng, m, 20);
    const auto b = random_lattice_division(rng, m, 20);
    const auto c = random_lattice_division(rng, m, 20);
    CHECK(l1_distance(a, b) == l1_distance(b, a));
    CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c));
    CHECK((l1_distance(a, b) == 0) == (a == b));
  }
}

TEST_CASE("social cost is additive over concatenation") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + uniform_index(rng, 3);
    const auto p = random_profile(rng, 1 + uniform_index(rng, 5), m);
    const auto r = random_profile(rng, 1 + uniform_index(rng, 5), m);
    const auto q = random_lattice_division(rng, m, 20);
    CHECK(social_cost(p.concat(r), q) == social_cost(p, q) + social_cost(r, q));
  }
}

TEST_CASE("order statistics columns are permutations of the input columns") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_profile(rng, 1 + uniform_index(rng, 6), 2 + uniform_index(rng, 4));
    const auto os = order_statistics(p);
    for (std::size_t j = 0; j < p.alternatives(); ++j) {
      auto col = p.column(j);
      std::sort(col.begin(), col.end(), std::greater<>());
      CHECK(os.column(j) == col);
    }
  }
}

TEST_CASE("random lattice divisions are valid and seeded") {
  Rng a(5), b(5);
  for (int k = 0; k < 50; ++k) {
    const auto x = random_lattice_division(a, 4, 20);
    CHECK(x == random_lattice_division(b, 4, 20));
    for (const auto& w : x.weights()) CHECK(Rational(w * 20).get_den() == 1);
  }
  const auto perm = random_permutation(a, 6);
  auto sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}
