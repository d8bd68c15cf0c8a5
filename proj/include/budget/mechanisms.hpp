#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "budget/core.hpp"
#include "budget/phantoms.hpp"

namespace budget {

/// Independent markets phantoms for n voters: f_k(t) = t(n-k)/n.
///
/// This is min{s(n-k), 1} reparametrized by s = t/n. Normalization is always
/// reached by s = 1/n (uniform phantoms), where no phantom has hit the cap,
/// so the cap never matters and the market supply is x = n/t. Only f_0
/// reaches 1 at t = 1, hence EndpointRule::AllowShortfall.
PhantomSystem im_phantom_system(std::size_t n);

/// Phantoms move from 0 to 1 one at a time: f_k rises linearly on
/// [k/(n+1), (k+1)/(n+1)].
PhantomSystem fstar_phantom_system(std::size_t n);

Division independent_markets(const Profile& profile);

/// Per-alternative bounds [rank I+1, rank I] of the order statistics that
/// bracket every social-welfare maximizer.
struct WelfareBand {
  std::size_t pivot = 0;  // I
  std::vector<Rational> lower;
  std::vector<Rational> upper;

  bool contains(const Division& q) const;
};

/// Uses the smallest I with sum_j rank(I+1, j) <= 1.
WelfareBand welfare_band(const Profile& profile);

struct WaterFillResult {
  Division outcome;
  Rational level;
  WelfareBand band;
};

/// Clamps a common level c into every band interval, with c chosen (leftmost)
/// so that the clamped values sum to 1.
WaterFillResult water_fill(const WelfareBand& band);

/// The welfare-maximizing moving phantom mechanism, computed directly.
Division utilitarian(const Profile& profile);

/// Phantoms for the two-alternative generalized median, alpha_0 >= ... >= alpha_n.
class MoulinPhantoms {
 public:
  explicit MoulinPhantoms(std::vector<Rational> alphas);

  /// alpha_k = 1 - k/n
  static MoulinPhantoms uniform(std::size_t n);
  /// Half the phantoms at 1, half at 0, and one at 1/2 when n+1 is odd.
  static MoulinPhantoms median(std::size_t n);
  static MoulinPhantoms constant(std::size_t n, const Rational& value);

  std::size_t voters() const { return alphas_.size() - 1; }
  const std::vector<Rational>& alphas() const { return alphas_; }
  /// {alpha_k} == {1 - alpha_k} as multisets.
  bool neutral() const;

 private:
  std::vector<Rational> alphas_;
};

/// Both coordinates of the m = 2 generalized median: the first against the
/// alphas, the second against 1 - alpha.
std::vector<Rational> moulin_generalized_median(const Profile& profile,
                                                const MoulinPhantoms& phantoms);

Division uniform_phantom_m2(const Profile& profile);

Division mean_mechanism(const Profile& profile);

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParimutuelResult {
  std::vector<double> prices;  // normalized to sum 1
  int iterations = 0;
};

/// Fisher-market prices under a single unit budget per voter, via
/// proportional-response dynamics. Floating point; baseline only.
ParimutuelResult parimutuel_consensus(const Profile& profile, double tolerance = 1e-10,
                                      int max_iterations = 100000);

/// Exact Fisher-market prices (normalized to sum 1). The dynamics above locate
/// the tight bang-per-buck edges; prices are then solved exactly on that graph
/// and accepted only if every voter is on a best edge and a max flow spends
/// every budget. Throws ConvergenceError if no candidate graph verifies.
Division parimutuel_exact(const Profile& profile);

/// A named mechanism. `tolerance` is 0 for exact mechanisms and bounds the
/// numerical noise of floating-point ones when comparing outcomes.
struct Mechanism {
  std::string id;
  std::function<Division(const Profile&)> run;
  double tolerance = 0.0;
};

/// Converts a floating-point division to an exact one: each double is taken
/// exactly and the vector is divided by its exact sum.
Division division_from_doubles(const std::vector<double>& values);

/// "independent-markets", "utilitarian", "uniform-phantom", "moulin",
/// "mean", "parimutuel". Throws InputError for unknown ids.
Mechanism find_mechanism(std::string_view id);
std::vector<std::string> mechanism_ids();

}  // namespace budget
