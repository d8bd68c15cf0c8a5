#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "budget/core.hpp"

namespace budget {

struct Breakpoint {
  Rational t;
  Rational value;
};

/// A continuous, weakly increasing, piecewise-linear map [0,1] -> [0,1]
/// given by its breakpoints (first at t = 0, last at t = 1).
class Trajectory {
 public:
  explicit Trajectory(std::vector<Breakpoint> points);

  Rational operator()(const Rational& t) const;
  std::span<const Breakpoint> points() const { return points_; }

 private:
  std::vector<Breakpoint> points_;
};

/// Whether every trajectory must end at 1, or may stop short of it. The
/// relaxed form is only sound when normalization is reached before t = 1;
/// the solver checks that for each profile.
enum class EndpointRule { Strict, AllowShortfall };

struct PhantomSnapshot {
  Rational t;
  std::vector<Rational> positions;  // f_0(t) >= ... >= f_n(t)
};

/// n+1 ordered phantom trajectories f_0 >= f_1 >= ... >= f_n.
class PhantomSystem {
 public:
  PhantomSystem(std::vector<Trajectory> trajectories,
                EndpointRule rule = EndpointRule::Strict);

  std::size_t voters() const { return trajectories_.size() - 1; }
  const Trajectory& trajectory(std::size_t k) const { return trajectories_.at(k); }
  EndpointRule endpoint_rule() const { return rule_; }

  /// Sorted union of all trajectory breakpoint times.
  std::vector<Rational> breakpoint_times() const;

 private:
  std::vector<Trajectory> trajectories_;
  EndpointRule rule_;
};

PhantomSnapshot eval_phantoms(const PhantomSystem& system, const Rational& t);

/// Median of the n+1 phantom positions and the n column entries.
Rational generalized_median(const PhantomSnapshot& snapshot, std::span<const Rational> column);

/// Generalized medians of every alternative at time t.
std::vector<Rational> medians_at(const PhantomSystem& system, const Profile& profile,
                                 const Rational& t);

Rational median_sum(const PhantomSystem& system, const Profile& profile, const Rational& t);

/// All times at which median_sum can change slope: trajectory breakpoints
/// plus every time a phantom passes a report value. Sorted, unique,
/// always containing 0 and 1.
std::vector<Rational> candidate_times(const PhantomSystem& system, const Profile& profile);

/// The closed set {t : median_sum(t) = 1}.
struct NormalizationInterval {
  Rational left;
  Rational right;
};

NormalizationInterval normalization_interval(const PhantomSystem& system, const Profile& profile);

/// Left endpoint of the normalization interval.
Rational solve_t_star(const PhantomSystem& system, const Profile& profile);

/// Generalized medians at a time where they are normalized; throws
/// std::domain_error if they do not sum to 1 at t.
Division aggregate_at(const PhantomSystem& system, const Profile& profile, const Rational& t);

/// The moving phantom aggregate.
Division aggregate(const PhantomSystem& system, const Profile& profile);

// Approximate route for systems known only through an evaluation callback.
// Never used by the built-in mechanisms.

using PhantomCallback = std::function<std::vector<double>(double t)>;

struct ApproximateAggregate {
  double t_star = 0.0;
  std::vector<double> outcome;
  double residual = 0.0;  // median_sum(t_star) - 1
  int iterations = 0;
  bool converged = false;
};

ApproximateAggregate aggregate_by_bisection(const PhantomCallback& phantoms, const Profile& profile,
                                            double tolerance = 1e-12, int max_iterations = 200);

}  // namespace budget
