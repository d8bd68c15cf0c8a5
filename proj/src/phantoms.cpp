#include "budget/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace budget {
namespace {

void sort_unique(std::vector<Rational>& values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
}

double median_of_doubles(std::vector<double> values) {
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace

Trajectory::Trajectory(std::vector<Breakpoint> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InputError("trajectory needs at least two breakpoints");
  if (points_.front().t != 0 || points_.back().t != 1) {
    throw InputError("trajectory breakpoints must start at t=0 and end at t=1");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.value < 0 || p.value > 1) throw InputError("trajectory value outside [0,1]");
    if (i > 0) {
      if (!(points_[i - 1].t < p.t)) throw InputError("trajectory times must strictly increase");
      if (p.value < points_[i - 1].value) throw InputError("trajectory must be weakly increasing");
    }
  }
}

Rational Trajectory::operator()(const Rational& t) const {
  if (t < 0 || t > 1) throw std::out_of_range("phantom time " + to_fraction(t) + " outside [0,1]");
  auto hi = std::lower_bound(points_.begin(), points_.end(), t,
                             [](const Breakpoint& p, const Rational& x) { return p.t < x; });
  if (hi->t == t) return hi->value;
  auto lo = hi - 1;
  return Rational(lo->value + (hi->value - lo->value) * (t - lo->t) / (hi->t - lo->t));
}

PhantomSystem::PhantomSystem(std::vector<Trajectory> trajectories, EndpointRule rule)
    : trajectories_(std::move(trajectories)), rule_(rule) {
  if (trajectories_.size() < 2) throw InputError("phantom system needs n+1 >= 2 trajectories");
  for (std::size_t k = 0; k < trajectories_.size(); ++k) {
    const auto pts = trajectories_[k].points();
    if (pts.front().value != 0) {
      throw InputError("phantom " + std::to_string(k) + " does not start at 0");
    }
    if (rule_ == EndpointRule::Strict && pts.back().value != 1) {
      throw InputError("phantom " + std::to_string(k) + " does not end at 1");
    }
  }
  for (const auto& t : breakpoint_times()) {
    for (std::size_t k = 0; k + 1 < trajectories_.size(); ++k) {
      if (trajectories_[k](t) < trajectories_[k + 1](t)) {
        throw InputError("phantoms " + std::to_string(k) + " and " + std::to_string(k + 1) +
                         " are out of order at t=" + to_fraction(t));
      }
    }
  }
}

std::vector<Rational> PhantomSystem::breakpoint_times() const {
  std::vector<Rational> times;
  for (const auto& f : trajectories_) {
    for (const auto& p : f.points()) times.push_back(p.t);
  }
  sort_unique(times);
  return times;
}

PhantomSnapshot eval_phantoms(const PhantomSystem& system, const Rational& t) {
  PhantomSnapshot snap{t, {}};
  snap.positions.reserve(system.voters() + 1);
  for (std::size_t k = 0; k <= system.voters(); ++k) snap.positions.push_back(system.trajectory(k)(t));
  return snap;
}

Rational generalized_median(const PhantomSnapshot& snapshot, std::span<const Rational> column) {
  if (snapshot.positions.size() != column.size() + 1) {
    throw DimensionError("generalized_median: " + std::to_string(column.size()) +
                         " reports need " + std::to_string(column.size() + 1) + " phantoms, got " +
                         std::to_string(snapshot.positions.size()));
  }
  std::vector<Rational> values(snapshot.positions.begin(), snapshot.positions.end());
  values.insert(values.end(), column.begin(), column.end());
  return median_of(std::move(values));
}

std::vector<Rational> medians_at(const PhantomSystem& system, const Profile& profile,
                                 const Rational& t) {
  if (system.voters() != profile.voters()) {
    throw DimensionError("phantom system built for " + std::to_string(system.voters()) +
                         " voters, profile has " + std::to_string(profile.voters()));
  }
  const PhantomSnapshot snap = eval_phantoms(system, t);
  std::vector<Rational> medians;
  medians.reserve(profile.alternatives());
  for (std::size_t j = 0; j < profile.alternatives(); ++j) {
    medians.push_back(generalized_median(snap, profile.column(j)));
  }
  return medians;
}

Rational median_sum(const PhantomSystem& system, const Profile& profile, const Rational& t) {
  Rational s = 0;
  for (const auto& v : medians_at(system, profile, t)) s += v;
  return s;
}

std::vector<Rational> candidate_times(const PhantomSystem& system, const Profile& profile) {
  std::vector<Rational> levels;
  for (const auto& r : profile.reports()) {
    for (const auto& w : r.weights()) levels.push_back(w);
  }
  sort_unique(levels);

  std::vector<Rational> times = system.breakpoint_times();
  for (std::size_t k = 0; k <= system.voters(); ++k) {
    const auto pts = system.trajectory(k).points();
    for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
      const auto& a = pts[p];
      const auto& b = pts[p + 1];
      if (a.value == b.value) continue;
      auto first = std::upper_bound(levels.begin(), levels.end(), a.value);
      auto last = std::lower_bound(levels.begin(), levels.end(), b.value);
      for (auto it = first; it != last; ++it) {
        times.push_back(a.t + (*it - a.value) * (b.t - a.t) / (b.value - a.value));
      }
    }
  }
  sort_unique(times);
  return times;
}

namespace {

// median_sum is continuous, weakly increasing and linear between consecutive
// candidate times, so the normalization set is found by bracketing on the
// candidates and interpolating within one segment.
struct Sweep {
  std::vector<Rational> times;
  std::vector<Rational> sums;  // lazily filled; valid where has[i]
  std::vector<bool> has;
  const PhantomSystem& system;
  const Profile& profile;

  Sweep(const PhantomSystem& f, const Profile& p)
      : times(candidate_times(f, p)), sums(times.size()), has(times.size(), false),
        system(f), profile(p) {}

  const Rational& sum(std::size_t i) {
    if (!has[i]) {
      sums[i] = median_sum(system, profile, times[i]);
      has[i] = true;
    }
    return sums[i];
  }

  // First index whose sum satisfies pred (pred monotone false -> true).
  template <class Pred>
  std::size_t first_index(Pred pred) {
    std::size_t lo = 0, hi = times.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (pred(sum(mid))) hi = mid;
      else lo = mid + 1;
    }
    return lo;
  }
};

}  // namespace

NormalizationInterval normalization_interval(const PhantomSystem& system, const Profile& profile) {
  Sweep sweep(system, profile);
  const std::size_t last = sweep.times.size() - 1;
  if (sweep.sum(last) < 1) {
    throw std::domain_error("phantom system never normalizes this profile (median sum at t=1 is " +
                            to_fraction(sweep.sum(last)) + ")");
  }

  NormalizationInterval out;
  const std::size_t a = sweep.first_index([](const Rational& s) { return s >= 1; });
  if (sweep.sum(a) == 1) {
    out.left = sweep.times[a];
  } else {
    const Rational& t0 = sweep.times[a - 1];
    const Rational& t1 = sweep.times[a];
    const Rational& s0 = sweep.sum(a - 1);
    const Rational& s1 = sweep.sum(a);
    out.left = t0 + (1 - s0) * (t1 - t0) / (s1 - s0);
    out.right = out.left;
    return out;
  }

  const std::size_t b = sweep.first_index([](const Rational& s) { return s > 1; });
  out.right = sweep.times[b - 1];
  return out;
}

Rational solve_t_star(const PhantomSystem& system, const Profile& profile) {
  return normalization_interval(system, profile).left;
}

Division aggregate_at(const PhantomSystem& system, const Profile& profile, const Rational& t) {
  auto medians = medians_at(system, profile, t);
  Rational s = 0;
  for (const auto& v : medians) s += v;
  if (s != 1) {
    throw std::domain_error("generalized medians at t=" + to_fraction(t) + " sum to " +
                            to_fraction(s));
  }
  return Division(std::move(medians));
}

Division aggregate(const PhantomSystem& system, const Profile& profile) {
  return aggregate_at(system, profile, solve_t_star(system, profile));
}

ApproximateAggregate aggregate_by_bisection(const PhantomCallback& phantoms, const Profile& profile,
                                            double tolerance, int max_iterations) {
  const std::size_t n = profile.voters();
  const std::size_t m = profile.alternatives();
  std::vector<std::vector<double>> columns(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& v : profile.column(j)) columns[j].push_back(v.get_d());
  }

  auto medians = [&](double t) {
    std::vector<double> pos = phantoms(t);
    if (pos.size() != n + 1) throw DimensionError("phantom callback returned wrong count");
    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> values = pos;
      values.insert(values.end(), columns[j].begin(), columns[j].end());
      out[j] = median_of_doubles(std::move(values));
    }
    return out;
  };
  auto total = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  };

  ApproximateAggregate result;
  double lo = 0.0, hi = 1.0;
  for (result.iterations = 1; result.iterations <= max_iterations; ++result.iterations) {
    const double mid = 0.5 * (lo + hi);
    auto med = medians(mid);
    const double residual = total(med) - 1.0;
    result.t_star = mid;
    result.outcome = std::move(med);
    result.residual = residual;
    if (std::abs(residual) <= tolerance) {
      result.converged = true;
      break;
    }
    if (residual < 0) lo = mid;
    else hi = mid;
  }
  if (result.iterations > max_iterations) result.iterations = max_iterations;
  return result;
}

}  // namespace budget
