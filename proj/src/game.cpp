#include "budget/game.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>

#include "budget/market.hpp"
#include "budget/mechanisms.hpp"
#include "budget/random.hpp"

namespace budget {

SpendingProfile::SpendingProfile(std::vector<std::vector<Rational>> spend)
    : spend_(std::move(spend)) {
  if (spend_.empty() || spend_.front().empty()) throw InputError("spending profile is empty");
  const std::size_t m = spend_.front().size();
  for (std::size_t i = 0; i < spend_.size(); ++i) {
    if (spend_[i].size() != m) throw DimensionError("spending rows have different lengths");
    for (auto& s : spend_[i]) {
      s.canonicalize();
      if (s < 0 || s > 1) {
        throw InputError("spending of voter " + std::to_string(i) + " outside [0,1]: " +
                         to_fraction(s));
      }
    }
  }
}

SpendingProfile SpendingProfile::with_row(std::size_t i, std::vector<Rational> row) const {
  auto next = spend_;
  next.at(i) = std::move(row);
  return SpendingProfile(std::move(next));
}

std::vector<Rational> SpendingProfile::column_sums() const {
  std::vector<Rational> sums(alternatives(), Rational(0));
  for (const auto& row : spend_) {
    for (std::size_t j = 0; j < row.size(); ++j) sums[j] += row[j];
  }
  return sums;
}

Rational SpendingProfile::total() const {
  Rational t = 0;
  for (const auto& c : column_sums()) t += c;
  return t;
}

Division game_outcome(const SpendingProfile& spending) {
  auto sums = spending.column_sums();
  Rational total = 0;
  for (const auto& s : sums) total += s;
  if (total == 0) throw InputError("game outcome undefined: nobody spends anything");
  for (auto& s : sums) s /= total;
  return Division(std::move(sums));
}

SpendingProfile equilibrium_spending(const Profile& profile) {
  const MarketClearing clearing = im_via_markets(profile);
  const std::size_t n = profile.voters();
  const std::size_t m = profile.alternatives();
  std::vector<std::vector<Rational>> spend(n, std::vector<Rational>(m, Rational(0)));

  for (std::size_t j = 0; j < m; ++j) {
    const Rational& price = clearing.prices[j];
    std::vector<std::size_t> boundary;
    long full = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Rational& v = profile[i][j];
      if (v > price) {
        spend[i][j] = 1;
        ++full;
      } else if (v == price) {
        boundary.push_back(i);
      }
    }
    const Rational rest = clearing.supply * price - full;
    if (rest == 0) continue;
    if (rest < 0 || boundary.empty() || rest > static_cast<long>(boundary.size())) {
      throw std::logic_error("market for alternative " + std::to_string(j) + " does not clear");
    }
    const Rational share = rest / Rational(static_cast<long>(boundary.size()));
    for (std::size_t i : boundary) spend[i][j] = share;
  }
  return SpendingProfile(std::move(spend));
}

bool satisfies_best_response_conditions(const SpendingProfile& spending, const Profile& profile,
                                        std::size_t voter) {
  const Division q = game_outcome(spending);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const Rational& ideal = profile[voter][j];
    const Rational& s = spending.at(voter, j);
    if (q[j] < ideal && s < 1) return false;
    if (q[j] > ideal && s > 0) return false;
  }
  return true;
}

namespace {

// Distance for voter i after replacing their row; nullopt if nobody spends.
std::optional<Rational> distance_with(const SpendingProfile& spending, const Profile& profile,
                                      std::size_t voter, const std::vector<Rational>& row) {
  const SpendingProfile next = spending.with_row(voter, row);
  if (next.total() == 0) return std::nullopt;
  return l1_distance(game_outcome(next), profile[voter]);
}

std::optional<Deviation> structural_step(const SpendingProfile& spending, const Profile& profile,
                                         std::size_t voter, std::size_t j, bool raise,
                                         const Rational& before) {
  const auto sums = spending.column_sums();
  const Rational total = spending.total();
  const Rational& ideal = profile[voter][j];
  const Rational& s = spending.at(voter, j);

  // Step that moves q_j exactly onto the voter's ideal, capped by [0,1].
  Rational step = raise ? Rational(1 - s) : s;
  if (ideal < 1) {
    Rational target = raise ? Rational((ideal * total - sums[j]) / (1 - ideal))
                            : Rational((sums[j] - ideal * total) / (1 - ideal));
    if (target < step) step = target;
  }
  for (int halving = 0; halving < 64 && step > 0; ++halving, step /= 2) {
    auto row = spending.row(voter);
    row[j] += raise ? step : Rational(-step);
    auto after = distance_with(spending, profile, voter, row);
    if (after && *after < before) {
      return Deviation{voter, j,
                       raise ? DeviationKind::RaiseUndervalued : DeviationKind::LowerOvervalued,
                       std::move(row), before, *after};
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Deviation> find_improving_deviation(const SpendingProfile& spending,
                                                  const Profile& profile, std::size_t voter) {
  const Division q = game_outcome(spending);
  const Rational before = l1_distance(q, profile[voter]);
  const std::size_t m = q.size();

  for (int pass = 0; pass < 2; ++pass) {
    const bool raise = pass == 0;
    for (std::size_t j = 0; j < m; ++j) {
      const Rational& ideal = profile[voter][j];
      const Rational& s = spending.at(voter, j);
      const bool violated = raise ? (q[j] < ideal && s < 1) : (q[j] > ideal && s > 0);
      if (!violated) continue;
      if (auto dev = structural_step(spending, profile, voter, j, raise, before)) return dev;
    }
  }

  auto try_row = [&](std::vector<Rational> row) -> std::optional<Deviation> {
    if (row == spending.row(voter)) return std::nullopt;
    auto after = distance_with(spending, profile, voter, row);
    if (after && *after < before) {
      return Deviation{voter, 0, DeviationKind::Probe, std::move(row), before, *after};
    }
    return std::nullopt;
  };

  if (m <= 10) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      std::vector<Rational> row(m);
      for (std::size_t j = 0; j < m; ++j) row[j] = (mask >> j) & 1U ? 1 : 0;
      if (auto dev = try_row(std::move(row))) return dev;
    }
  }
  const Rational deltas[] = {make_rational(1, 8), make_rational(1, 4), make_rational(1, 2),
                             Rational(1)};
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& delta : deltas) {
      for (int sign : {+1, -1}) {
        auto row = spending.row(voter);
        Rational moved = sign > 0 ? Rational(row[j] + delta) : Rational(row[j] - delta);
        row[j] = std::clamp(moved, Rational(0), Rational(1));
        if (auto dev = try_row(std::move(row))) return dev;
      }
    }
  }
  return std::nullopt;
}

std::vector<Rational> best_response(const SpendingProfile& spending, const Profile& profile,
                                    std::size_t voter) {
  const std::size_t m = profile.alternatives();
  const Division& ideal = profile[voter];
  std::vector<Rational> others = spending.column_sums();
  Rational others_total = 0;
  for (std::size_t j = 0; j < m; ++j) {
    others[j] -= spending.at(voter, j);
    others_total += others[j];
  }

  std::vector<Rational> row(m);
  if (others_total == 0) {
    // Alone in the game: any spend proportional to the ideal enforces it.
    Rational top = *std::max_element(ideal.weights().begin(), ideal.weights().end());
    for (std::size_t j = 0; j < m; ++j) row[j] = ideal[j] / top;
    return row;
  }

  // With total spending D, spend_j = clamp(p_j D - O_j, 0, 1) meets the
  // best-response conditions; D must then equal O_T + sum_j spend_j.
  auto spend_at = [&](const Rational& total) {
    std::vector<Rational> r(m);
    for (std::size_t j = 0; j < m; ++j) {
      r[j] = std::clamp(Rational(ideal[j] * total - others[j]), Rational(0), Rational(1));
    }
    return r;
  };
  auto excess = [&](const Rational& total) {
    Rational h = others_total - total;
    for (const auto& s : spend_at(total)) h += s;
    return h;
  };

  std::vector<Rational> knots;
  for (std::size_t j = 0; j < m; ++j) {
    if (ideal[j] == 0) continue;
    for (Rational k : {Rational(others[j] / ideal[j]), Rational((others[j] + 1) / ideal[j])}) {
      if (k > others_total) knots.push_back(k);
    }
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  Rational prev = others_total;
  Rational h_prev = excess(prev);
  Rational root;
  bool found = h_prev == 0;
  if (found) root = prev;
  for (const auto& k : knots) {
    if (found) break;
    Rational h = excess(k);
    if (h <= 0) {
      root = h == 0 ? k : Rational(prev + h_prev * (k - prev) / (h_prev - h));
      found = true;
    }
    prev = k;
    h_prev = h;
  }
  if (!found) root = prev + h_prev;  // past the last knot the slope is -1
  if (root == 0) throw std::logic_error("best response with zero total spending");
  return spend_at(root);
}

namespace {

enum class Regime : char { Zero, Interior, One };

std::vector<Regime> regimes(const SpendingProfile& state) {
  std::vector<Regime> out;
  for (std::size_t i = 0; i < state.voters(); ++i) {
    for (std::size_t j = 0; j < state.alternatives(); ++j) {
      const Rational& s = state.at(i, j);
      out.push_back(s == 0 ? Regime::Zero : s == 1 ? Regime::One : Regime::Interior);
    }
  }
  return out;
}

// Once the 0/interior/1 pattern stops changing, the dynamics are affine and
// head for the point where every interior entry puts its column exactly at
// the voter's ideal: sum_k s_kj = p_ij D, with D the total spend. Solve that
// directly; free directions keep their current values.
std::optional<SpendingProfile> pattern_fixed_point(const SpendingProfile& state,
                                                   const Profile& profile,
                                                   const std::vector<Regime>& pattern) {
  const std::size_t n = state.voters();
  const std::size_t m = state.alternatives();
  std::vector<std::size_t> var(n * m, SIZE_MAX);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (pattern[i * m + j] != Regime::Interior) continue;
      var[i * m + j] = cells.size();
      cells.emplace_back(i, j);
    }
  }
  const std::size_t d = cells.size();  // index of D
  const std::size_t cols = d + 1;
  auto fixed = [&](std::size_t i, std::size_t j) {
    return pattern[i * m + j] == Regime::One ? Rational(1) : Rational(0);
  };

  // rows of [coefficients | rhs]
  std::vector<std::vector<Rational>> a;
  for (const auto& [i, j] : cells) {
    std::vector<Rational> row(cols + 1, Rational(0));
    for (std::size_t k = 0; k < n; ++k) {
      if (var[k * m + j] != SIZE_MAX) row[var[k * m + j]] += 1;
      else row[cols] -= fixed(k, j);
    }
    row[d] -= profile[i][j];
    a.push_back(std::move(row));
  }
  {
    std::vector<Rational> row(cols + 1, Rational(0));
    for (std::size_t c = 0; c < d; ++c) row[c] = 1;
    row[d] = -1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (var[i * m + j] == SIZE_MAX) row[cols] -= fixed(i, j);
      }
    }
    a.push_back(std::move(row));
  }

  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t piv = r;
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[r], a[piv]);
    const Rational inv = 1 / a[r][c];
    for (auto& v : a[r]) v *= inv;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (k == r || a[k][c] == 0) continue;
      const Rational f = a[k][c];
      for (std::size_t x = 0; x <= cols; ++x) a[k][x] -= f * a[r][x];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t k = r; k < a.size(); ++k) {
    if (a[k][cols] != 0) return std::nullopt;  // inconsistent
  }

  std::vector<Rational> x(cols);
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;
  for (std::size_t c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    x[c] = c == d ? state.total() : state.at(cells[c].first, cells[c].second);
  }
  for (std::size_t k = 0; k < r; ++k) {
    Rational v = a[k][cols];
    for (std::size_t c = 0; c < cols; ++c) {
      if (!is_pivot[c]) v -= a[k][c] * x[c];
    }
    x[pivot_col[k]] = v;
  }

  std::vector<std::vector<Rational>> spend(n, std::vector<Rational>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t v = var[i * m + j];
      if (v == SIZE_MAX) spend[i][j] = fixed(i, j);
      else if (x[v] < 0 || x[v] > 1) return std::nullopt;
      else spend[i][j] = x[v];
    }
  }
  SpendingProfile candidate(std::move(spend));
  if (candidate.total() == 0) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) {
    if (!satisfies_best_response_conditions(candidate, profile, i)) return std::nullopt;
  }
  return candidate;
}

}  // namespace

EquilibriumReport verify_unique_equilibrium_outcome(const Profile& profile, std::size_t trials,
                                                    std::uint64_t seed, std::size_t round_cap) {
  EquilibriumReport report{trials, 0, 0, 0, independent_markets(profile), {}, 0, 0};
  const std::size_t n = profile.voters();
  const std::size_t m = profile.alternatives();
  Rng rng(seed);

  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<std::vector<Rational>> start(n, std::vector<Rational>(m));
    for (auto& row : start) {
      for (auto& s : row) s = make_rational(static_cast<long>(uniform_index(rng, 5)), 4);
    }
    SpendingProfile state(std::move(start));
    if (state.total() == 0) state = state.with_row(0, std::vector<Rational>(m, Rational(1)));

    bool converged = false;
    bool jumped = false;
    std::size_t round = 0;
    std::vector<Regime> pattern = regimes(state);
    for (; round < round_cap && !converged; ++round) {
      bool moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (satisfies_best_response_conditions(state, profile, i)) continue;
        state = state.with_row(i, best_response(state, profile, i));
        moved = true;
      }
      converged = !moved;
      if (converged) break;
      auto now = regimes(state);
      if (now == pattern) {
        if (auto fp = pattern_fixed_point(state, profile, now)) {
          state = std::move(*fp);
          converged = jumped = true;
        }
      }
      pattern = std::move(now);
    }
    report.max_rounds = std::max(report.max_rounds, round);
    if (converged) {
      for (std::size_t i = 0; i < n && converged; ++i) {
        converged = !find_improving_deviation(state, profile, i).has_value();
      }
    }
    if (!converged) {
      ++report.not_converged;
      continue;
    }
    ++report.converged;
    if (jumped) ++report.extrapolated;
    Division outcome = game_outcome(state);
    if (!(outcome == report.expected)) ++report.mismatched;
    if (std::find(report.distinct_outcomes.begin(), report.distinct_outcomes.end(), outcome) ==
        report.distinct_outcomes.end()) {
      report.distinct_outcomes.push_back(std::move(outcome));
    }
  }
  return report;
}

}  // namespace budget
