#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "budget/mechanisms.hpp"
#include "budget/phantoms.hpp"
#include "support.hpp"

using namespace budget;
using namespace fixture;

namespace {

std::vector<Rational> V(std::initializer_list<const char*> xs) {
  std::vector<Rational> v;
  for (const char* x : xs) v.push_back(R(x));
  return v;
}

}  // namespace

TEST_CASE("trajectory validation") {
  CHECK_THROWS_AS(Trajectory({{R("0.1"), R("0")}, {R("1"), R("1")}}), InputError);
  CHECK_THROWS_AS(Trajectory({{R("0"), R("0.5")}, {R("1"), R("0.2")}}), InputError);
  CHECK_THROWS_AS(Trajectory({{R("0"), R("0")}, {R("0.5"), R("0.5")}, {R("0.5"), R("0.6")}, {R("1"), R("1")}}),
                  InputError);
  const Trajectory f({{R("0"), R("0")}, {R("0.5"), R("0")}, {R("1"), R("1")}});
  CHECK(f(R("0.75")) == R("0.5"));
  CHECK(f(R("0.25")) == 0);
  CHECK_THROWS_AS(f(R("1.5")), std::out_of_range);
  CHECK_THROWS_AS(f(R("-0.1")), std::out_of_range);
}

TEST_CASE("phantom systems must be ordered and start at zero") {
  const Trajectory up({{R("0"), R("0")}, {R("1"), R("1")}});
  const Trajectory late({{R("0"), R("0")}, {R("0.5"), R("0")}, {R("1"), R("1")}});
  CHECK_NOTHROW(PhantomSystem({up, late}));
  CHECK_THROWS(PhantomSystem({late, up}));
  const Trajectory short_of_one({{R("0"), R("0")}, {R("1"), R("0.5")}});
  CHECK_THROWS(PhantomSystem({up, short_of_one}));
  CHECK_NOTHROW(PhantomSystem({up, short_of_one}, EndpointRule::AllowShortfall));
}

TEST_CASE("phantom snapshots") {
  CHECK(eval_phantoms(im_phantom_system(3), R("0.6")).positions == V({"0.6", "0.4", "0.2", "0"}));
  CHECK(eval_phantoms(fstar_phantom_system(5), R("0.65")).positions == V({"1", "1", "1", "0.9", "0", "0"}));
  for (const auto& system : {im_phantom_system(4), fstar_phantom_system(4)}) {
    for (const auto& f : eval_phantoms(system, 0).positions) CHECK(f == 0);
  }
  CHECK_THROWS_AS(eval_phantoms(im_phantom_system(3), R("1.01")), std::out_of_range);
}

TEST_CASE("generalized median") {
  const PhantomSnapshot snap{R("0.6"), V({"0.6", "0.4", "0.2", "0"})};
  CHECK(generalized_median(snap, V({"0", "0.5", "0.9"})) == R("0.4"));
  CHECK(generalized_median({R("0"), V({"0", "0", "0", "0"})}, V({"0.9", "0", "0.3"})) == 0);
  CHECK(generalized_median({R("0"), V({"0.6", "0.3", "0"})}, V({"0.2", "0"})) == R("0.2"));
  CHECK_THROWS_AS(generalized_median(snap, V({"0", "0.5"})), DimensionError);
}

TEST_CASE("median sum endpoints") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 5), m = 2 + uniform_index(rng, 3);
    const auto p = random_profile(rng, n, m);
    CHECK(median_sum(im_phantom_system(n), p, 0) == 0);
    CHECK(median_sum(fstar_phantom_system(n), p, 0) == 0);
    CHECK(median_sum(fstar_phantom_system(n), p, 1) == static_cast<long>(m));
    CHECK(median_sum(im_phantom_system(n), p, 1) >= 1);
  }
  CHECK(median_sum(im_phantom_system(3), three_voter(), R("0.6")) == 1);
}

TEST_CASE("normalization time") {
  CHECK(solve_t_star(im_phantom_system(3), three_voter()) == R("0.6"));
  // Two voters: the phantoms at t* are (0.6, 0.3, 0).
  const auto t = solve_t_star(im_phantom_system(2), dominated());
  CHECK(eval_phantoms(im_phantom_system(2), t).positions == V({"0.6", "0.3", "0"}));
  CHECK(t == R("0.6"));

  const auto uniform = P({{"1/3", "1/3", "1/3"}, {"1/3", "1/3", "1/3"}});
  for (const auto& system : {im_phantom_system(2), fstar_phantom_system(2)}) {
    CHECK(median_sum(system, uniform, solve_t_star(system, uniform)) == 1);
  }
}

TEST_CASE("aggregate") {
  CHECK(aggregate(im_phantom_system(3), three_voter()) == D({"0.4", "0.4", "0.2"}));
  CHECK(aggregate(im_phantom_system(2), dominated()) == D({"0.6", "0.2", "0.2"}));
  CHECK_THROWS_AS(aggregate_at(im_phantom_system(3), three_voter(), R("0.5")), std::domain_error);

  Rng rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 5);
    const auto x = random_lattice_division(rng, 2 + uniform_index(rng, 3), 20);
    const Profile unanimous(std::vector<Division>(n, x));
    CHECK(im_oracle(unanimous) == x);
    CHECK(aggregate(im_phantom_system(n), unanimous) == x);
    CHECK(aggregate(fstar_phantom_system(n), unanimous) == x);
  }
}

TEST_CASE("single voter profiles run unchanged") {
  const auto p = P({{"0.2", "0.3", "0.5"}});
  CHECK(aggregate(im_phantom_system(1), p) == p[0]);
  CHECK(aggregate(fstar_phantom_system(1), p) == p[0]);
}

TEST_CASE("independent markets agrees with the scan oracle") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_profile(rng, 1 + uniform_index(rng, 6), 2 + uniform_index(rng, 4));
    CHECK(aggregate(im_phantom_system(p.voters()), p) == im_oracle(p));
  }
}

TEST_CASE("median sum is weakly increasing") {
  Rng rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 5);
    const auto p = random_profile(rng, n, 2 + uniform_index(rng, 3));
    for (const auto& system : {im_phantom_system(n), fstar_phantom_system(n)}) {
      auto ts = candidate_times(system, p);
      for (long k = 0; k <= 97; ++k) ts.push_back(make_rational(k, 97));
      std::sort(ts.begin(), ts.end());
      Rational prev = -1;
      for (const auto& t : ts) {
        const Rational s = median_sum(system, p, t);
        CHECK(prev <= s);
        prev = s;
      }
    }
  }
}

TEST_CASE("aggregate does not depend on the choice of normalization time") {
  Rng rng(25);
  int nondegenerate = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 4);
    const auto p = trial % 2 ? random_profile(rng, n, 2 + uniform_index(rng, 3), 4)
                             : random_profile(rng, n, 2 + uniform_index(rng, 3), 20);
    for (const auto& system : {im_phantom_system(n), fstar_phantom_system(n)}) {
      const auto interval = normalization_interval(system, p);
      CHECK(median_sum(system, p, interval.left) == 1);
      CHECK(median_sum(system, p, interval.right) == 1);
      if (interval.left < interval.right) {
        ++nondegenerate;
        CHECK(aggregate_at(system, p, interval.left) == aggregate_at(system, p, interval.right));
        CHECK(aggregate_at(system, p, (interval.left + interval.right) / 2) ==
              aggregate_at(system, p, interval.left));
      }
    }
  }
  CHECK(nondegenerate > 0);
}

TEST_CASE("anonymity and neutrality of the engine") {
  Rng rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 5), m = 2 + uniform_index(rng, 3);
    const auto p = random_profile(rng, n, m);
    const auto sigma = random_permutation(rng, n);
    const auto tau = random_permutation(rng, m);
    for (const auto& system : {im_phantom_system(n), fstar_phantom_system(n)}) {
      const auto base = aggregate(system, p);
      CHECK(aggregate(system, p.permute_voters(sigma)) == base);
      CHECK(aggregate(system, p.permute_alternatives(tau)) == permute(base, tau));
    }
  }
}

TEST_CASE("no voter gains by misreporting") {
  Rng rng(27);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 4), m = 2 + uniform_index(rng, 3);
    const auto p = random_profile(rng, n, m);
    const std::size_t i = uniform_index(rng, n);
    const auto lie = random_lattice_division(rng, m, 20);
    for (const auto& system : {im_phantom_system(n), fstar_phantom_system(n)}) {
      const auto honest = l1_distance(aggregate(system, p), p[i]);
      const auto lying = l1_distance(aggregate(system, p.with_report(i, lie)), p[i]);
      CHECK(lying >= honest);
    }
  }
}

TEST_CASE("moving support toward an alternative never lowers its share") {
  Rng rng(28);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 4), m = 2 + uniform_index(rng, 3);
    const auto p = random_profile(rng, n, m);
    const std::size_t i = uniform_index(rng, n), j = uniform_index(rng, m);
    if (p[i][j] == 0) continue;
    // Lower coordinate j and spread the freed mass over the others.
    const Rational cut = p[i][j] * make_rational(1 + static_cast<long>(uniform_index(rng, 4)), 4);
    std::vector<Rational> w(p[i].weights().begin(), p[i].weights().end());
    w[j] -= cut;
    const std::size_t k = (j + 1 + uniform_index(rng, m - 1)) % m;
    w[k] += cut;
    const Division lower(w);
    for (const auto& system : {im_phantom_system(n), fstar_phantom_system(n)}) {
      CHECK(aggregate(system, p)[j] >= aggregate(system, p.with_report(i, lower))[j]);
    }
  }
}

TEST_CASE("aggregate changes shrink with the perturbation") {
  Rng rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 3), m = 2 + uniform_index(rng, 3);
    const auto p = random_profile(rng, n, m);
    const std::size_t i = uniform_index(rng, n);
    std::size_t from = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (p[i][j] > p[i][from]) from = j;
    }
    const std::size_t to = (from + 1) % m;
    for (const auto& system : {im_phantom_system(n), fstar_phantom_system(n)}) {
      const auto base = aggregate(system, p);
      Rational previous = 3;
      for (const char* eps : {"1e-2", "1e-4", "1e-6"}) {
        std::vector<Rational> w(p[i].weights().begin(), p[i].weights().end());
        w[from] -= R(eps);
        w[to] += R(eps);
        const auto change = l1_distance(base, aggregate(system, p.with_report(i, Division(w))));
        CHECK(change <= previous);
        CHECK(change <= R(eps) * 2 * static_cast<long>(m));
        previous = change;
      }
    }
  }
}

TEST_CASE("bisection fallback approximates the exact aggregate") {
  const auto p = three_voter();
  const PhantomCallback im = [](double t) {
    return std::vector<double>{t, t * 2 / 3, t / 3, 0.0};
  };
  const auto approx = aggregate_by_bisection(im, p);
  CHECK(approx.converged);
  CHECK(approx.t_star == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(approx.outcome[0] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(approx.outcome[2] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(std::abs(approx.residual) <= 1e-12);
}
