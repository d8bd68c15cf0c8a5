#pragma once

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "budget/core.hpp"
#include "budget/random.hpp"

namespace fixture {

using budget::Division;
using budget::Profile;
using budget::Rational;

inline Rational R(const char* s) { return budget::parse_rational(s); }

inline Division D(std::initializer_list<const char*> ws) {
  std::vector<Rational> v;
  for (const char* w : ws) v.push_back(R(w));
  return Division(std::move(v));
}

inline Profile P(std::initializer_list<std::initializer_list<const char*>> rows) {
  std::vector<Division> reports;
  for (const auto& r : rows) reports.push_back(D(r));
  return Profile(std::move(reports));
}

inline Profile three_voter() { return P({{"0", "0.5", "0.5"}, {"0.5", "0.5", "0"}, {"0.9", "0", "0.1"}}); }
inline Profile dominated() { return P({{"0.8", "0.2", "0"}, {"0.8", "0", "0.2"}}); }
inline Profile pari_swing() { return P({{"0", "0.5", "0.5"}, {"0.5", "0.5", "0"}}); }

inline Profile random_profile(budget::Rng& rng, std::size_t n, std::size_t m, long d = 20) {
  std::vector<Division> reports;
  for (std::size_t i = 0; i < n; ++i) reports.push_back(budget::random_lattice_division(rng, m, d));
  return Profile(std::move(reports));
}

// Independent reference computations. Each is a deliberately naive route to
// the same number so the library is never checked against itself.

inline Rational naive_median(std::vector<Rational> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Independent markets from scratch: phantoms at t(n-k)/n, scan every time a
// phantom meets a report, interpolate on the bracketing piece.
inline std::vector<Rational> im_medians(const Profile& p, const Rational& t) {
  const std::size_t n = p.voters();
  std::vector<Rational> out;
  for (std::size_t j = 0; j < p.alternatives(); ++j) {
    std::vector<Rational> all;
    for (std::size_t k = 0; k <= n; ++k) all.push_back(t * Rational(static_cast<long>(n - k), static_cast<long>(n)));
    for (std::size_t i = 0; i < n; ++i) all.push_back(p[i][j]);
    out.push_back(naive_median(all));
  }
  return out;
}

inline Rational sum_of(const std::vector<Rational>& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

inline Division im_oracle(const Profile& p) {
  const std::size_t n = p.voters();
  std::vector<Rational> ts{Rational(0), Rational(1)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p.alternatives(); ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        Rational t = p[i][j] * static_cast<long>(n) / static_cast<long>(n - k);
        if (t <= 1) ts.push_back(t);
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  for (std::size_t a = 0; a + 1 < ts.size(); ++a) {
    const Rational s0 = sum_of(im_medians(p, ts[a]));
    const Rational s1 = sum_of(im_medians(p, ts[a + 1]));
    if (s0 == 1) return Division(im_medians(p, ts[a]));
    if (s0 < 1 && s1 >= 1) {
      Rational t = ts[a] + (ts[a + 1] - ts[a]) * (1 - s0) / (s1 - s0);
      return Division(im_medians(p, t));
    }
  }
  return Division(im_medians(p, Rational(1)));
}

// Welfare maximizer with the entropy tie-break, via the band of order
// statistics and a level found piece by piece.
inline Division utilitarian_oracle(const Profile& p) {
  const std::size_t n = p.voters(), m = p.alternatives();
  auto rank = [&](std::size_t r, std::size_t j) -> Rational {
    if (r == 0) return 1;
    if (r > n) return 0;
    auto col = p.column(j);
    std::sort(col.begin(), col.end(), std::greater<>());
    return col[r - 1];
  };
  std::size_t pivot = 0;
  while (true) {
    Rational s = 0;
    for (std::size_t j = 0; j < m; ++j) s += rank(pivot + 1, j);
    if (s <= 1) break;
    ++pivot;
  }
  std::vector<Rational> lo(m), hi(m);
  for (std::size_t j = 0; j < m; ++j) {
    lo[j] = rank(pivot + 1, j);
    hi[j] = rank(pivot, j);
  }
  auto filled = [&](const Rational& c) {
    std::vector<Rational> q(m);
    for (std::size_t j = 0; j < m; ++j) q[j] = std::clamp(c, lo[j], hi[j]);
    return q;
  };
  std::vector<Rational> levels(lo);
  levels.insert(levels.end(), hi.begin(), hi.end());
  std::sort(levels.begin(), levels.end());
  for (std::size_t a = 0; a + 1 < levels.size(); ++a) {
    const Rational s0 = sum_of(filled(levels[a])), s1 = sum_of(filled(levels[a + 1]));
    if (s0 == 1) return Division(filled(levels[a]));
    if (s0 < 1 && s1 >= 1) {
      return Division(filled(levels[a] + (levels[a + 1] - levels[a]) * (1 - s0) / (s1 - s0)));
    }
  }
  return Division(filled(levels.back()));
}

// sup{pi : sum_i demand > x}, by looking at every piece between candidate
// prices where the number of buyers is fixed.
inline Rational clearing_oracle(const std::vector<Rational>& values, const Rational& x) {
  std::vector<Rational> pts{Rational(0)};
  for (const auto& v : values) pts.push_back(v);
  for (std::size_t k = 0; k <= values.size(); ++k) pts.push_back(Rational(static_cast<long>(k)) / x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Rational best = 0;
  for (std::size_t a = 0; a + 1 < pts.size(); ++a) {
    const Rational mid = (pts[a] + pts[a + 1]) / 2;
    long buyers = 0;
    for (const auto& v : values) buyers += v > mid ? 1 : 0;
    Rational reach = Rational(buyers) / x;
    if (reach > pts[a]) best = std::max(best, std::min(Rational(pts[a + 1]), reach));
  }
  return best;
}

}  // namespace fixture
