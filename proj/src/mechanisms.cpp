#include "budget/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace budget {

PhantomSystem im_phantom_system(std::size_t n) {
  if (n == 0) throw InputError("independent markets needs at least one voter");
  std::vector<Trajectory> trajectories;
  trajectories.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    trajectories.emplace_back(std::vector<Breakpoint>{
        {Rational(0), Rational(0)},
        {Rational(1), make_rational(static_cast<long>(n - k), static_cast<long>(n))}});
  }
  return PhantomSystem(std::move(trajectories), EndpointRule::AllowShortfall);
}

PhantomSystem fstar_phantom_system(std::size_t n) {
  if (n == 0) throw InputError("phantom system needs at least one voter");
  const long steps = static_cast<long>(n + 1);
  std::vector<Trajectory> trajectories;
  trajectories.reserve(n + 1);
  for (long k = 0; k < steps; ++k) {
    std::vector<Breakpoint> pts;
    pts.push_back({Rational(0), Rational(0)});
    if (k > 0) pts.push_back({make_rational(k, steps), Rational(0)});
    pts.push_back({make_rational(k + 1, steps), Rational(1)});
    if (k + 1 < steps) pts.push_back({Rational(1), Rational(1)});
    trajectories.emplace_back(std::move(pts));
  }
  return PhantomSystem(std::move(trajectories), EndpointRule::Strict);
}

Division independent_markets(const Profile& profile) {
  return aggregate(im_phantom_system(profile.voters()), profile);
}

bool WelfareBand::contains(const Division& q) const {
  if (q.size() != lower.size()) throw DimensionError("welfare band: dimension mismatch");
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] < lower[j] || q[j] > upper[j]) return false;
  }
  return true;
}

WelfareBand welfare_band(const Profile& profile) {
  const OrderStatistics stats(profile);
  const std::size_t n = profile.voters();
  WelfareBand band;
  band.pivot = n;
  for (std::size_t rank = 0; rank <= n; ++rank) {
    if (stats.rank_sum(rank + 1) <= 1) {
      band.pivot = rank;
      break;
    }
  }
  for (std::size_t j = 0; j < profile.alternatives(); ++j) {
    band.lower.push_back(stats.at(band.pivot + 1, j));
    band.upper.push_back(stats.at(band.pivot, j));
  }
  return band;
}

WaterFillResult water_fill(const WelfareBand& band) {
  const std::size_t m = band.lower.size();
  // (position, slope change): a band starts absorbing water at its lower
  // end and is saturated at its upper end.
  std::vector<std::pair<Rational, int>> events;
  events.reserve(2 * m);
  Rational filled = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (band.lower[j] > band.upper[j]) throw std::logic_error("welfare band is inverted");
    filled += band.lower[j];
    events.emplace_back(band.lower[j], +1);
    events.emplace_back(band.upper[j], -1);
  }
  if (filled > 1) throw std::logic_error("welfare band lower ends exceed 1");
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  Rational level = events.front().first;
  int slope = 0;
  bool found = filled == 1;
  for (std::size_t e = 0; e < events.size() && !found;) {
    const Rational& next = events[e].first;
    if (slope > 0) {
      Rational reach = filled + slope * (next - level);
      if (reach >= 1) {
        level += (1 - filled) / slope;
        found = true;
        break;
      }
      filled = reach;
    }
    level = next;
    while (e < events.size() && events[e].first == next) slope += events[e++].second;
  }
  if (!found) throw std::logic_error("welfare band upper ends sum below 1");

  std::vector<Rational> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) out.push_back(median3(band.lower[j], band.upper[j], level));
  return {Division(std::move(out)), level, band};
}

Division utilitarian(const Profile& profile) { return water_fill(welfare_band(profile)).outcome; }

MoulinPhantoms::MoulinPhantoms(std::vector<Rational> alphas) : alphas_(std::move(alphas)) {
  if (alphas_.size() < 2) throw InputError("moulin phantoms: need n+1 >= 2 values");
  for (std::size_t k = 0; k < alphas_.size(); ++k) {
    if (alphas_[k] < 0 || alphas_[k] > 1) throw InputError("moulin phantom outside [0,1]");
    if (k > 0 && alphas_[k] > alphas_[k - 1]) {
      throw InputError("moulin phantoms must be weakly decreasing");
    }
  }
}

MoulinPhantoms MoulinPhantoms::uniform(std::size_t n) {
  std::vector<Rational> a;
  for (std::size_t k = 0; k <= n; ++k) {
    a.push_back(make_rational(static_cast<long>(n - k), static_cast<long>(n)));
  }
  return MoulinPhantoms(std::move(a));
}

MoulinPhantoms MoulinPhantoms::median(std::size_t n) {
  const std::size_t count = n + 1;
  std::vector<Rational> a(count / 2, Rational(1));
  if (count % 2 == 1) a.push_back(make_rational(1, 2));
  a.resize(count, Rational(0));
  return MoulinPhantoms(std::move(a));
}

MoulinPhantoms MoulinPhantoms::constant(std::size_t n, const Rational& value) {
  return MoulinPhantoms(std::vector<Rational>(n + 1, value));
}

bool MoulinPhantoms::neutral() const {
  std::vector<Rational> mirrored;
  for (const auto& a : alphas_) mirrored.push_back(1 - a);
  std::vector<Rational> sorted = alphas_;
  std::sort(sorted.begin(), sorted.end());
  std::sort(mirrored.begin(), mirrored.end());
  return sorted == mirrored;
}

std::vector<Rational> moulin_generalized_median(const Profile& profile,
                                                const MoulinPhantoms& phantoms) {
  if (profile.alternatives() != 2) throw InputError("moulin mechanism requires m = 2");
  if (phantoms.voters() != profile.voters()) {
    throw DimensionError("moulin mechanism: " + std::to_string(profile.voters()) +
                         " voters need " + std::to_string(profile.voters() + 1) + " phantoms");
  }
  std::vector<Rational> first = profile.column(0);
  std::vector<Rational> second = profile.column(1);
  for (const auto& a : phantoms.alphas()) {
    first.push_back(a);
    second.push_back(1 - a);
  }
  return {median_of(std::move(first)), median_of(std::move(second))};
}

Division uniform_phantom_m2(const Profile& profile) {
  if (profile.alternatives() != 2) throw InputError("uniform phantom mechanism requires m = 2");
  auto coords = moulin_generalized_median(profile, MoulinPhantoms::uniform(profile.voters()));
  return Division(std::move(coords));
}

Division mean_mechanism(const Profile& profile) {
  const std::size_t m = profile.alternatives();
  std::vector<Rational> sums(m, Rational(0));
  for (const auto& r : profile.reports()) {
    for (std::size_t j = 0; j < m; ++j) sums[j] += r[j];
  }
  const Rational n(static_cast<long>(profile.voters()));
  for (auto& s : sums) s /= n;
  return Division(std::move(sums));
}

namespace {

ParimutuelResult proportional_response(const Profile& profile, double tolerance,
                                       int max_iterations, bool& converged) {
  const std::size_t n = profile.voters();
  const std::size_t m = profile.alternatives();
  std::vector<std::vector<double>> value(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) value[i] = profile[i].to_doubles();

  std::vector<std::vector<double>> bids(n, std::vector<double>(m, 1.0 / static_cast<double>(m)));
  std::vector<double> price(m), previous(m, -1.0);

  for (int it = 1; it <= max_iterations; ++it) {
    std::fill(price.begin(), price.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) price[j] += bids[i][j];
    }
    double total = 0.0;
    for (double p : price) total += p;
    std::vector<double> normalized(m);
    double change = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      normalized[j] = price[j] / total;
      change += std::abs(normalized[j] - previous[j]);
    }
    if (change < tolerance || it == max_iterations) {
      converged = change < tolerance;
      return {normalized, it};
    }
    previous = normalized;

    // Each voter re-splits their unit budget in proportion to the utility
    // each good contributed in the last round.
    for (std::size_t i = 0; i < n; ++i) {
      double utility = 0.0;
      std::vector<double> gain(m, 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        if (price[j] > 0.0) gain[j] = value[i][j] * bids[i][j] / price[j];
        utility += gain[j];
      }
      if (utility <= 0.0) throw ConvergenceError("parimutuel: voter has no positive utility");
      for (std::size_t j = 0; j < m; ++j) bids[i][j] = gain[j] / utility;
    }
  }
  converged = false;
  return {previous, max_iterations};
}

// Max flow from voters (capacity 1 each) through tight edges to goods
// (capacity p_j). Dense Edmonds-Karp; instances are tiny.
Rational max_flow(std::size_t n, std::size_t m, const std::vector<std::vector<bool>>& edge,
                  const std::vector<Rational>& price) {
  const std::size_t nodes = n + m + 2, source = n + m, sink = n + m + 1;
  std::vector<std::vector<Rational>> cap(nodes, std::vector<Rational>(nodes, 0));
  Rational big = Rational(static_cast<long>(n) + 1);
  for (std::size_t i = 0; i < n; ++i) {
    cap[source][i] = 1;
    for (std::size_t j = 0; j < m; ++j) {
      if (edge[i][j]) cap[i][n + j] = big;
    }
  }
  for (std::size_t j = 0; j < m; ++j) cap[n + j][sink] = price[j];

  Rational flow = 0;
  while (true) {
    std::vector<std::size_t> parent(nodes, nodes);
    parent[source] = source;
    std::vector<std::size_t> queue{source};
    for (std::size_t h = 0; h < queue.size() && parent[sink] == nodes; ++h) {
      const std::size_t u = queue[h];
      for (std::size_t v = 0; v < nodes; ++v) {
        if (parent[v] == nodes && cap[u][v] > 0) {
          parent[v] = u;
          queue.push_back(v);
        }
      }
    }
    if (parent[sink] == nodes) return flow;
    Rational push = big;
    for (std::size_t v = sink; v != source; v = parent[v]) push = std::min(push, Rational(cap[parent[v]][v]));
    for (std::size_t v = sink; v != source; v = parent[v]) {
      cap[parent[v]][v] -= push;
      cap[v][parent[v]] += push;
    }
    flow += push;
  }
}

std::optional<std::vector<Rational>> prices_on_graph(const Profile& profile,
                                                     const std::vector<std::vector<bool>>& edge) {
  const std::size_t n = profile.voters(), m = profile.alternatives();
  std::vector<Rational> rel(m, 0);
  std::vector<bool> seen_good(m, false), seen_voter(n, false);
  std::vector<Rational> price(m, 0);

  for (std::size_t start = 0; start < m; ++start) {
    if (seen_good[start]) continue;
    bool wanted = false;
    for (std::size_t i = 0; i < n; ++i) wanted = wanted || edge[i][start];
    if (!wanted) {
      // Untraded goods must be worthless to everyone.
      for (std::size_t i = 0; i < n; ++i) {
        if (profile[i][start] > 0) return std::nullopt;
      }
      seen_good[start] = true;
      continue;
    }
    std::vector<std::size_t> goods{start};
    std::size_t voters = 0;
    seen_good[start] = true;
    rel[start] = 1;
    for (std::size_t h = 0; h < goods.size(); ++h) {
      const std::size_t j = goods[h];
      for (std::size_t i = 0; i < n; ++i) {
        if (!edge[i][j]) continue;
        if (!seen_voter[i]) {
          seen_voter[i] = true;
          ++voters;
        }
        for (std::size_t k = 0; k < m; ++k) {
          if (!edge[i][k]) continue;
          Rational r = rel[j] * profile[i][k] / profile[i][j];
          if (!seen_good[k]) {
            seen_good[k] = true;
            rel[k] = r;
            goods.push_back(k);
          } else if (rel[k] != r) {
            return std::nullopt;
          }
        }
      }
    }
    Rational total = 0;
    for (std::size_t k : goods) total += rel[k];
    for (std::size_t k : goods) price[k] = rel[k] * static_cast<long>(voters) / total;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen_voter[i]) return std::nullopt;
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::optional<Rational> best;
    for (std::size_t j = 0; j < m; ++j) {
      if (edge[i][j]) best = profile[i][j] / price[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (profile[i][j] == 0) continue;
      if (price[j] == 0 || profile[i][j] / price[j] > *best) return std::nullopt;
    }
  }
  if (max_flow(n, m, edge, price) != static_cast<long>(n)) return std::nullopt;
  return price;
}

}  // namespace

ParimutuelResult parimutuel_consensus(const Profile& profile, double tolerance,
                                      int max_iterations) {
  bool converged = false;
  auto result = proportional_response(profile, tolerance, max_iterations, converged);
  if (!converged) {
    throw ConvergenceError("parimutuel consensus did not converge in " +
                           std::to_string(max_iterations) + " iterations");
  }
  return result;
}

Division parimutuel_exact(const Profile& profile) {
  const std::size_t n = profile.voters(), m = profile.alternatives();
  const std::pair<double, int> stages[] = {{1e-8, 2000}, {1e-11, 20000}, {1e-13, 200000}};
  for (const auto& [tolerance, cap] : stages) {
    bool converged = false;
    const auto approx = proportional_response(profile, tolerance, cap, converged);
    for (double slack : {1e-9, 1e-7, 1e-5, 1e-4, 1e-3, 1e-2, 5e-2}) {
      std::vector<std::vector<bool>> edge(n, std::vector<bool>(m, false));
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = profile[i].to_doubles();
        double best = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          if (v[j] > 0.0 && approx.prices[j] > 0.0) best = std::max(best, v[j] / approx.prices[j]);
        }
        for (std::size_t j = 0; j < m; ++j) {
          edge[i][j] = v[j] > 0.0 && approx.prices[j] > 0.0 &&
                       v[j] / approx.prices[j] >= (1.0 - slack) * best;
        }
      }
      if (auto price = prices_on_graph(profile, edge)) {
        for (auto& p : *price) p /= static_cast<long>(n);
        return Division(std::move(*price));
      }
    }
  }
  throw ConvergenceError("parimutuel: no tight-edge graph verified");
}

Division division_from_doubles(const std::vector<double>& values) {
  std::vector<Rational> exact;
  Rational total = 0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("division_from_doubles: bad value");
    exact.emplace_back(v);
    total += exact.back();
  }
  if (total == 0) throw InputError("division_from_doubles: all zero");
  for (auto& e : exact) e /= total;
  return Division(std::move(exact));
}

namespace {

const std::map<std::string, Mechanism, std::less<>>& registry() {
  static const std::map<std::string, Mechanism, std::less<>> table = [] {
    std::map<std::string, Mechanism, std::less<>> t;
    auto add = [&t](Mechanism m) { t.emplace(m.id, std::move(m)); };
    add({"independent-markets", independent_markets, 0.0});
    add({"utilitarian", utilitarian, 0.0});
    add({"uniform-phantom", uniform_phantom_m2, 0.0});
    add({"moulin",
         [](const Profile& p) {
           return Division(moulin_generalized_median(p, MoulinPhantoms::median(p.voters())));
         },
         0.0});
    add({"mean", mean_mechanism, 0.0});
    add({"parimutuel", parimutuel_exact, 0.0});
    return t;
  }();
  return table;
}

}  // namespace

Mechanism find_mechanism(std::string_view id) {
  const auto& table = registry();
  auto it = table.find(id);
  if (it == table.end()) throw InputError("unknown mechanism '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> mechanism_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : registry()) ids.push_back(id);
  return ids;
}

}  // namespace budget
