#include "budget/properties.hpp"

#include <algorithm>

#include "budget/generate.hpp"
#include "budget/random.hpp"

namespace budget {
namespace {

Rational tolerance_of(const Mechanism& m) { return Rational(m.tolerance); }

// a < b by more than the mechanism's numerical tolerance.
bool clearly_less(const Rational& a, const Rational& b, const Rational& tol) { return a + tol < b; }

bool same_outcome(const Division& a, const Division& b, const Rational& tol) {
  return tol == 0 ? a == b : l1_distance(a, b) <= tol;
}

AxiomReport make_report(Axiom axiom, const Mechanism& mechanism, std::uint64_t seed = 0) {
  AxiomReport r;
  r.axiom = axiom;
  r.mechanism = mechanism.id;
  r.seed = seed;
  return r;
}

void record(AxiomReport& report, Counterexample ce) {
  report.verdict = Verdict::Violated;
  report.counterexample = std::move(ce);
}

Counterexample ic_counterexample(const Profile& profile, Profile modified, std::size_t voter,
                                 Division outcome, Division manipulated, Rational before,
                                 Rational after) {
  Counterexample ce{profile,  std::move(modified), std::nullopt, voter,          0, {},
                    std::move(outcome), std::move(manipulated), std::move(before), std::move(after)};
  return ce;
}

Division shift_mass(const Division& truth, std::size_t from, std::size_t to, const Rational& delta) {
  std::vector<Rational> w(truth.weights().begin(), truth.weights().end());
  w[from] -= delta;
  w[to] += delta;
  return Division(std::move(w));
}

bool dominates(const Profile& profile, const Division& q, const std::vector<Rational>& current) {
  bool strict = false;
  for (std::size_t i = 0; i < profile.voters(); ++i) {
    Rational d = l1_distance(q, profile[i]);
    if (d > current[i]) return false;
    if (d < current[i]) strict = true;
  }
  return strict;
}

void enumerate(std::size_t index, long remaining, std::vector<Rational>& coords, long d,
               const std::function<void(const Division&)>& visit) {
  const std::size_t m = coords.size();
  if (index + 1 == m) {
    coords[index] = make_rational(remaining, d);
    visit(Division(coords));
    return;
  }
  for (long k = 0; k <= remaining; ++k) {
    coords[index] = make_rational(k, d);
    enumerate(index + 1, remaining - k, coords, d, visit);
  }
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Violated: return "violated";
    case Verdict::Vacuous: return "vacuous";
  }
  return "?";
}

std::string_view to_string(Axiom a) {
  switch (a) {
    case Axiom::IncentiveCompatibility: return "incentive-compatibility";
    case Axiom::ParetoOptimality: return "pareto-optimality";
    case Axiom::Proportionality: return "proportionality";
    case Axiom::Monotonicity: return "monotonicity";
    case Axiom::Participation: return "participation";
    case Axiom::Reinforcement: return "reinforcement";
    case Axiom::RangeRespecting: return "range-respecting";
    case Axiom::Anonymity: return "anonymity";
    case Axiom::Neutrality: return "neutrality";
  }
  return "?";
}

mpz_class GridSpec::count() const {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(resolution + static_cast<long>(dimension) - 1),
               static_cast<unsigned long>(dimension - 1));
  return c;
}

void for_each_lattice_division(const GridSpec& grid,
                               const std::function<void(const Division&)>& visit) {
  if (grid.resolution <= 0 || grid.dimension < 1) throw InputError("grid: invalid resolution");
  if (grid.count() > grid.cap) {
    throw InputError("grid with " + grid.count().get_str() + " points exceeds the cap of " +
                     std::to_string(grid.cap));
  }
  std::vector<Rational> coords(grid.dimension);
  enumerate(0, grid.resolution, coords, grid.resolution, visit);
}

std::vector<Division> structured_misreports(const Division& truth) {
  const std::size_t m = truth.size();
  std::vector<Division> out;
  auto add = [&](Division d) {
    if (d == truth) return;
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(std::move(d));
  };
  for (std::size_t j = 0; j < m; ++j) add(Division::unit(m, j));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      std::vector<Rational> w(truth.weights().begin(), truth.weights().end());
      std::swap(w[a], w[b]);
      add(Division(std::move(w)));
    }
  }
  const Rational deltas[] = {make_rational(1, 10), make_rational(1, 4), make_rational(1, 2)};
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b || truth[a] == 0) continue;
      for (const auto& delta : deltas) add(shift_mass(truth, a, b, std::min(delta, truth[a])));
    }
  }
  return out;
}

AxiomReport check_incentive_compatibility(const Mechanism& mechanism, const Profile& profile,
                                          MisreportStrategy strategy, std::size_t trials,
                                          std::uint64_t seed) {
  AxiomReport report = make_report(Axiom::IncentiveCompatibility, mechanism, seed);
  report.established = "sampled misreports";
  const Rational tol = tolerance_of(mechanism);
  const Division truthful = mechanism.run(profile);
  std::vector<std::optional<std::vector<Division>>> pools(profile.voters());
  Rng rng(seed);

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t i = uniform_index(rng, profile.voters());
    const bool structured = strategy == MisreportStrategy::Structured ||
                            (strategy == MisreportStrategy::Mixed && trial % 2 == 0);
    std::optional<Division> misreport;
    if (structured) {
      if (!pools[i]) pools[i] = structured_misreports(profile[i]);
      if (pools[i]->empty()) continue;
      misreport = (*pools[i])[uniform_index(rng, pools[i]->size())];
    } else {
      misreport = random_lattice_division(rng, profile.alternatives(), 20);
    }
    ++report.trials;
    Profile modified = profile.with_report(i, *misreport);
    Division manipulated = mechanism.run(modified);
    Rational before = l1_distance(truthful, profile[i]);
    Rational after = l1_distance(manipulated, profile[i]);
    if (clearly_less(after, before, tol)) {
      record(report, ic_counterexample(profile, std::move(modified), i, truthful,
                                       std::move(manipulated), std::move(before), std::move(after)));
      break;
    }
  }
  return report;
}

AxiomReport check_incentive_compatibility_structured(const Mechanism& mechanism,
                                                     const Profile& profile) {
  AxiomReport report = make_report(Axiom::IncentiveCompatibility, mechanism);
  report.established = "every voter against every structured misreport";
  const Rational tol = tolerance_of(mechanism);
  const Division truthful = mechanism.run(profile);
  for (std::size_t i = 0; i < profile.voters(); ++i) {
    const Rational before = l1_distance(truthful, profile[i]);
    for (const auto& misreport : structured_misreports(profile[i])) {
      ++report.trials;
      Profile modified = profile.with_report(i, misreport);
      Division manipulated = mechanism.run(modified);
      Rational after = l1_distance(manipulated, profile[i]);
      if (clearly_less(after, before, tol)) {
        record(report, ic_counterexample(profile, std::move(modified), i, truthful,
                                         std::move(manipulated), before, std::move(after)));
        return report;
      }
    }
  }
  return report;
}

std::vector<Division> pareto_improvements(const Profile& profile, const Division& outcome,
                                          const GridSpec& grid) {
  if (grid.dimension != profile.alternatives()) throw DimensionError("grid dimension mismatch");
  std::vector<Rational> current;
  for (const auto& r : profile.reports()) current.push_back(l1_distance(outcome, r));
  std::vector<Division> out;
  for_each_lattice_division(grid, [&](const Division& q) {
    if (dominates(profile, q, current)) out.push_back(q);
  });
  return out;
}

AxiomReport check_pareto(const Profile& profile, const Division& outcome, const GridSpec& grid,
                         std::string mechanism) {
  AxiomReport report;
  report.axiom = Axiom::ParetoOptimality;
  report.mechanism = std::move(mechanism);
  report.trials = static_cast<std::size_t>(grid.count().get_ui());
  auto improvements = pareto_improvements(profile, outcome, grid);
  if (!improvements.empty()) {
    Counterexample ce{profile, std::nullopt, std::nullopt, 0, 0, {}, outcome,
                      improvements.front(), social_cost(profile, outcome),
                      social_cost(profile, improvements.front())};
    record(report, std::move(ce));
    report.established = "dominating lattice division found";
    return report;
  }
  report.established = welfare_band(profile).contains(outcome)
                            ? "certified: outcome lies in the welfare band"
                            : "no improvement on the 1/" + std::to_string(grid.resolution) +
                                  " lattice (one-sided)";
  return report;
}

AxiomReport check_proportionality(const Mechanism& mechanism,
                                  const std::vector<std::size_t>& voter_counts) {
  AxiomReport report = make_report(Axiom::Proportionality, mechanism);
  report.trials = 1;
  report.established = "single-minded profile";
  const Profile profile = single_minded_profile(voter_counts);
  const long n = static_cast<long>(profile.voters());
  std::vector<Rational> shares;
  for (std::size_t c : voter_counts) shares.push_back(make_rational(static_cast<long>(c), n));
  Division expected(std::move(shares));
  Division outcome = mechanism.run(profile);
  if (!same_outcome(outcome, expected, tolerance_of(mechanism))) {
    Rational gap = l1_distance(outcome, expected);
    Counterexample ce{profile, std::nullopt, std::nullopt, 0, 0, {}, std::move(outcome),
                      std::move(expected), Rational(0), std::move(gap)};
    record(report, std::move(ce));
  }
  return report;
}

AxiomReport check_monotonicity(const Mechanism& mechanism, const Profile& profile,
                               std::size_t voter, std::size_t alternative, const Division& report_in,
                               const Division& shifted) {
  const std::size_t m = profile.alternatives();
  if (report_in.size() != m || shifted.size() != m) throw DimensionError("monotonicity pair size");
  if (!(report_in[alternative] > shifted[alternative])) {
    throw InputError("monotonicity premise: p_j must exceed p'_j");
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (k != alternative && report_in[k] > shifted[k]) {
      throw InputError("monotonicity premise: p_k must not exceed p'_k for k != j");
    }
  }
  AxiomReport report = make_report(Axiom::Monotonicity, mechanism);
  report.trials = 1;
  Profile with_p = profile.with_report(voter, report_in);
  Profile with_shift = profile.with_report(voter, shifted);
  Division high = mechanism.run(with_p);
  Division low = mechanism.run(with_shift);
  if (clearly_less(high[alternative], low[alternative], tolerance_of(mechanism))) {
    Rational before = high[alternative];
    Rational after = low[alternative];
    Counterexample ce{std::move(with_p), std::move(with_shift), std::nullopt, voter, alternative,
                      {}, std::move(high), std::move(low), std::move(before), std::move(after)};
    record(report, std::move(ce));
  }
  return report;
}

AxiomReport check_monotonicity(const Mechanism& mechanism, const Profile& profile,
                               std::size_t trials, std::uint64_t seed) {
  AxiomReport report = make_report(Axiom::Monotonicity, mechanism, seed);
  report.established = "sampled mass shifts";
  const std::size_t m = profile.alternatives();
  Rng rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t i = uniform_index(rng, profile.voters());
    const Division& p = profile[i];
    std::vector<std::size_t> positive;
    for (std::size_t j = 0; j < m; ++j) {
      if (p[j] > 0) positive.push_back(j);
    }
    const std::size_t j = positive[uniform_index(rng, positive.size())];
    const Rational delta = p[j] * make_rational(static_cast<long>(1 + uniform_index(rng, 4)), 4);
    const Division spread = random_lattice_division(rng, m - 1, 4);
    std::vector<Rational> w(p.weights().begin(), p.weights().end());
    w[j] -= delta;
    for (std::size_t k = 0, s = 0; k < m; ++k) {
      if (k != j) w[k] += delta * spread[s++];
    }
    AxiomReport one = check_monotonicity(mechanism, profile, i, j, p, Division(std::move(w)));
    ++report.trials;
    if (one.verdict == Verdict::Violated) {
      report.verdict = Verdict::Violated;
      report.counterexample = std::move(one.counterexample);
      break;
    }
  }
  return report;
}

AxiomReport check_participation(const Mechanism& mechanism, const Profile& profile,
                                std::size_t voter) {
  if (profile.voters() < 2) throw InputError("participation needs at least two voters");
  AxiomReport report = make_report(Axiom::Participation, mechanism);
  report.trials = 1;
  Profile absent = profile.without(voter);
  Division joined = mechanism.run(profile);
  Division abstained = mechanism.run(absent);
  Rational before = l1_distance(joined, profile[voter]);
  Rational after = l1_distance(abstained, profile[voter]);
  if (clearly_less(after, before, tolerance_of(mechanism))) {
    Counterexample ce{profile, std::move(absent), std::nullopt, voter, 0, {}, std::move(joined),
                      std::move(abstained), std::move(before), std::move(after)};
    record(report, std::move(ce));
  }
  return report;
}

AxiomReport check_reinforcement(const Mechanism& mechanism, const Profile& first,
                                const Profile& second) {
  AxiomReport report = make_report(Axiom::Reinforcement, mechanism);
  const Rational tol = tolerance_of(mechanism);
  Division a = mechanism.run(first);
  Division b = mechanism.run(second);
  if (!same_outcome(a, b, tol)) {
    report.verdict = Verdict::Vacuous;
    report.established = "premise M(P) = M(R) not met";
    return report;
  }
  report.trials = 1;
  Profile combined = first.concat(second);
  Division joint = mechanism.run(combined);
  if (!same_outcome(joint, a, tol)) {
    Rational gap = l1_distance(joint, a);
    Counterexample ce{first, std::move(combined), second, 0, 0, {}, std::move(a), std::move(joint),
                      Rational(0), std::move(gap)};
    record(report, std::move(ce));
  }
  return report;
}

AxiomReport check_range_respecting(const Mechanism& mechanism, const Profile& profile) {
  AxiomReport report = make_report(Axiom::RangeRespecting, mechanism);
  report.trials = 1;
  const Rational tol = tolerance_of(mechanism);
  Division outcome = mechanism.run(profile);
  for (std::size_t j = 0; j < profile.alternatives(); ++j) {
    auto col = profile.column(j);
    const Rational lo = *std::min_element(col.begin(), col.end());
    const Rational hi = *std::max_element(col.begin(), col.end());
    std::optional<Rational> bound;
    if (clearly_less(outcome[j], lo, tol)) bound = lo;
    if (clearly_less(hi, outcome[j], tol)) bound = hi;
    if (bound) {
      Rational value = outcome[j];
      Counterexample ce{profile, std::nullopt, std::nullopt, 0, j, {}, std::move(outcome),
                        std::nullopt, std::move(*bound), std::move(value)};
      record(report, std::move(ce));
      break;
    }
  }
  return report;
}

SymmetryReport check_symmetries(const Mechanism& mechanism, const Profile& profile,
                                std::size_t permutations, std::uint64_t seed) {
  SymmetryReport out{make_report(Axiom::Anonymity, mechanism, seed),
                     make_report(Axiom::Neutrality, mechanism, seed)};
  out.anonymity.established = "sampled voter permutations";
  out.neutrality.established = "sampled alternative permutations";
  const Rational tol = tolerance_of(mechanism);
  const Division base = mechanism.run(profile);
  Rng rng(seed);
  for (std::size_t k = 0; k < permutations; ++k) {
    if (out.anonymity.verdict == Verdict::Holds) {
      auto sigma = random_permutation(rng, profile.voters());
      Profile permuted = profile.permute_voters(sigma);
      Division result = mechanism.run(permuted);
      ++out.anonymity.trials;
      if (!same_outcome(result, base, tol)) {
        Rational gap = l1_distance(result, base);
        record(out.anonymity, Counterexample{profile, std::move(permuted), std::nullopt, 0, 0,
                                             std::move(sigma), base, std::move(result), Rational(0),
                                             std::move(gap)});
      }
    }
    if (out.neutrality.verdict == Verdict::Holds) {
      auto tau = random_permutation(rng, profile.alternatives());
      Profile permuted = profile.permute_alternatives(tau);
      Division result = mechanism.run(permuted);
      Division expected = permute(base, tau);
      ++out.neutrality.trials;
      if (!same_outcome(result, expected, tol)) {
        Rational gap = l1_distance(result, expected);
        record(out.neutrality, Counterexample{profile, std::move(permuted), std::nullopt, 0, 0,
                                              std::move(tau), base, std::move(result), Rational(0),
                                              std::move(gap)});
      }
    }
  }
  return out;
}

std::vector<Division> brute_force_welfare_oracle(const Profile& profile, const GridSpec& grid) {
  if (grid.dimension != profile.alternatives()) throw DimensionError("grid dimension mismatch");
  std::vector<Division> best;
  std::optional<Rational> best_cost;
  for_each_lattice_division(grid, [&](const Division& q) {
    Rational c = social_cost(profile, q);
    if (!best_cost || c < *best_cost) {
      best_cost = c;
      best.clear();
    }
    if (c == *best_cost) best.push_back(q);
  });
  return best;
}

bool reverify(const AxiomReport& report, const Mechanism& mechanism) {
  if (!report.counterexample) return false;
  const Counterexample& ce = *report.counterexample;
  const Rational tol = tolerance_of(mechanism);
  const Division outcome = mechanism.run(ce.profile);

  switch (report.axiom) {
    case Axiom::IncentiveCompatibility:
    case Axiom::Participation: {
      if (!ce.modified) return false;
      const Division& ideal = ce.profile[ce.voter];
      Rational before = l1_distance(outcome, ideal);
      Rational after = l1_distance(mechanism.run(*ce.modified), ideal);
      return before == ce.before && after == ce.after && clearly_less(after, before, tol);
    }
    case Axiom::Monotonicity: {
      if (!ce.modified) return false;
      Rational before = outcome[ce.alternative];
      Rational after = mechanism.run(*ce.modified)[ce.alternative];
      return before == ce.before && after == ce.after && clearly_less(before, after, tol);
    }
    case Axiom::Reinforcement: {
      if (!ce.modified || !ce.other) return false;
      if (!same_outcome(outcome, mechanism.run(*ce.other), tol)) return false;
      return !same_outcome(mechanism.run(*ce.modified), outcome, tol);
    }
    case Axiom::RangeRespecting: {
      auto col = ce.profile.column(ce.alternative);
      const Rational lo = *std::min_element(col.begin(), col.end());
      const Rational hi = *std::max_element(col.begin(), col.end());
      const Rational& v = outcome[ce.alternative];
      return v == ce.after && (clearly_less(v, lo, tol) || clearly_less(hi, v, tol));
    }
    case Axiom::Anonymity: {
      if (!ce.modified) return false;
      return !same_outcome(mechanism.run(*ce.modified), outcome, tol);
    }
    case Axiom::Neutrality: {
      if (!ce.modified) return false;
      return !same_outcome(mechanism.run(*ce.modified), permute(outcome, ce.permutation), tol);
    }
    case Axiom::ParetoOptimality: {
      if (!ce.witness) return false;
      std::vector<Rational> current;
      for (const auto& r : ce.profile.reports()) current.push_back(l1_distance(ce.outcome, r));
      return dominates(ce.profile, *ce.witness, current);
    }
    case Axiom::Proportionality: {
      if (!ce.witness) return false;
      return !same_outcome(outcome, *ce.witness, tol);
    }
  }
  return false;
}

}  // namespace budget
