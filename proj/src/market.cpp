#include "budget/market.hpp"

#include <algorithm>
#include <functional>

namespace budget {

const Rational& ExtendedRational::value() const {
  if (!value_) throw std::logic_error("infinite demand has no rational value");
  return *value_;
}

ExtendedRational demand(const Rational& value, const Rational& price) {
  if (value < 0 || price < 0) throw InputError("demand: negative value or price");
  if (price == 0) return ExtendedRational::infinity();
  if (price < value) return ExtendedRational::finite(Rational(1 / price));
  return ExtendedRational::finite(Rational(0));
}

namespace {

void check_market(const MarketInstance& market) {
  if (market.supply <= 0) throw InputError("market supply must be positive");
  for (const auto& v : market.values) {
    if (v < 0) throw InputError("market values must be nonnegative");
  }
}

}  // namespace

Rational clearing_price(const MarketInstance& market) {
  check_market(market);
  std::vector<Rational> sorted = market.values;
  std::sort(sorted.begin(), sorted.end());
  const long n = static_cast<long>(sorted.size());
  auto count_at_least = [&](const Rational& price) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), price);
    return static_cast<long>(sorted.end() - it);
  };

  std::vector<Rational> candidates = sorted;
  for (long k = 1; k <= n; ++k) candidates.push_back(Rational(k) / market.supply);

  // A positive price p is at most the clearing price exactly when total
  // demand exceeds supply at every price just below p, i.e. when the
  // count of voters valuing the good at >= p satisfies count >= x p > 0.
  Rational best = 0;
  for (const auto& p : candidates) {
    if (p <= 0 || p <= best) continue;
    const long count = count_at_least(p);
    if (count >= 1 && Rational(count) >= market.supply * p) best = p;
  }
  return best;
}

Rational market_median(const MarketInstance& market) {
  check_market(market);
  const long n = static_cast<long>(market.values.size());
  std::vector<Rational> entries = market.values;
  for (long k = 0; k <= n; ++k) entries.push_back(Rational(k) / market.supply);
  return median_of(std::move(entries));
}

std::vector<Rational> clearing_prices(const Profile& profile, const Rational& supply) {
  std::vector<Rational> prices;
  prices.reserve(profile.alternatives());
  for (std::size_t j = 0; j < profile.alternatives(); ++j) {
    prices.push_back(clearing_price(MarketInstance{supply, profile.column(j)}));
  }
  return prices;
}

MarketClearing im_via_markets(const Profile& profile) {
  const long n = static_cast<long>(profile.voters());
  std::vector<Rational> supplies;
  for (const auto& r : profile.reports()) {
    for (const auto& v : r.weights()) {
      if (v <= 0) continue;
      for (long k = 1; k <= n; ++k) supplies.push_back(Rational(k) / v);
    }
  }
  std::sort(supplies.begin(), supplies.end());
  supplies.erase(std::unique(supplies.begin(), supplies.end()), supplies.end());

  auto total_price = [&](const Rational& x) {
    Rational s = 0;
    for (const auto& p : clearing_prices(profile, x)) s += p;
    return s;
  };
  // Between consecutive candidate supplies every market price is either a
  // fixed report or k/x, so the price sum has the form A + B/x.
  auto solve_segment = [](const Rational& a, const Rational& pa, const Rational& b,
                          const Rational& pb) {
    Rational slope = (pa - pb) / (1 / a - 1 / b);
    Rational offset = pa - slope / a;
    return Rational(slope / (1 - offset));
  };

  // The price sum is nonincreasing in supply; find the first candidate
  // where it drops below 1.
  std::size_t lo = 0, hi = supplies.size();
  std::vector<Rational> cache(supplies.size());
  std::vector<bool> has(supplies.size(), false);
  auto at = [&](std::size_t i) -> const Rational& {
    if (!has[i]) {
      cache[i] = total_price(supplies[i]);
      has[i] = true;
    }
    return cache[i];
  };
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (at(mid) < 1) hi = mid;
    else lo = mid + 1;
  }

  Rational x;
  if (lo == supplies.size()) {
    const Rational& a = supplies.back();
    Rational b = 2 * a;
    x = at(lo - 1) == 1 ? a : solve_segment(a, at(lo - 1), b, total_price(b));
  } else if (lo == 0) {
    throw std::logic_error("price sum below 1 at the smallest candidate supply");
  } else if (at(lo - 1) == 1) {
    x = supplies[lo - 1];
  } else {
    x = solve_segment(supplies[lo - 1], at(lo - 1), supplies[lo], at(lo));
  }
  return {x, Division(clearing_prices(profile, x))};
}

DemanderSets verify_lp_certificate(const Profile& profile, const Division& outcome) {
  const std::size_t m = profile.alternatives();
  if (outcome.size() != m) throw DimensionError("certificate: outcome dimension mismatch");

  DemanderSets cert;
  cert.demanders.resize(m);
  cert.boundary.resize(m);
  std::optional<Rational> z_lo, z_hi, eps;
  std::size_t total_demanders = 0;

  for (std::size_t j = 0; j < m; ++j) {
    const Rational& p = outcome[j];
    for (std::size_t i = 0; i < profile.voters(); ++i) {
      const Rational& v = profile[i][j];
      if (p < v) {
        cert.demanders[j].push_back(i);
        Rational slack = v - p;
        if (!eps || slack < *eps) eps = slack;
      } else if (p == v) {
        cert.boundary[j].push_back(i);
      }
    }
    const std::size_t strict = cert.demanders[j].size();
    const std::size_t loose = strict + cert.boundary[j].size();
    total_demanders += strict;
    if (p == 0) {
      if (strict > 0) {
        throw CertificateError("alternative " + std::to_string(j) +
                               " has price 0 but positive demand");
      }
      continue;
    }
    if (loose == 0) {
      throw CertificateError("alternative " + std::to_string(j) +
                             " has a positive price but no buyer values it that high");
    }
    Rational lower = p / Rational(static_cast<long>(loose));
    if (!z_lo || lower > *z_lo) z_lo = lower;
    if (strict > 0) {
      Rational upper = p / Rational(static_cast<long>(strict));
      if (!z_hi || upper < *z_hi) z_hi = upper;
    }
  }

  if (!z_lo) throw CertificateError("outcome has no positive coordinate");
  if (z_hi && *z_lo > *z_hi) {
    throw CertificateError("no common supply clears every market at these prices (z in [" +
                           to_fraction(*z_lo) + ", " + to_fraction(*z_hi) + "])");
  }
  cert.z = *z_lo;
  cert.epsilon = eps ? *eps : Rational(1);

  cert.exact_equality = total_demanders > 0;
  if (cert.exact_equality) {
    const Rational z = Rational(1) / Rational(static_cast<long>(total_demanders));
    for (std::size_t j = 0; j < m; ++j) {
      if (outcome[j] != z * Rational(static_cast<long>(cert.demanders[j].size()))) {
        cert.exact_equality = false;
        break;
      }
    }
  }
  cert.uses_boundary = !cert.exact_equality;

  // Re-check every constraint family at the chosen z.
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i : cert.demanders[j]) {
      if (profile[i][j] < outcome[j] + cert.epsilon) throw std::logic_error("certificate slack");
    }
    const Rational strict_spend = cert.z * Rational(static_cast<long>(cert.demanders[j].size()));
    const Rational loose_spend =
        cert.z * Rational(static_cast<long>(cert.demanders[j].size() + cert.boundary[j].size()));
    if (outcome[j] < strict_spend || (outcome[j] > loose_spend && outcome[j] > 0)) {
      throw CertificateError("alternative " + std::to_string(j) + " is not cleared at z = " +
                             to_fraction(cert.z));
    }
  }
  return cert;
}

}  // namespace budget
