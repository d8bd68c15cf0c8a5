#include "budget/generate.hpp"

#include <algorithm>
#include <numeric>

namespace budget {

Division random_lattice_division(Rng& rng, std::size_t m, long d) {
  if (m == 0 || d <= 0) throw InputError("random division: need m >= 1 and d >= 1");
  std::vector<long> cuts;
  cuts.reserve(m + 1);
  cuts.push_back(0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    cuts.push_back(static_cast<long>(uniform_index(rng, static_cast<std::size_t>(d) + 1)));
  }
  cuts.push_back(d);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> w;
  w.reserve(m);
  for (std::size_t j = 0; j < m; ++j) w.push_back(make_rational(cuts[j + 1] - cuts[j], d));
  return Division(std::move(w));
}

std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[uniform_index(rng, k)]);
  return order;
}

ProfileKind parse_profile_kind(std::string_view name) {
  if (name == "single-minded") return ProfileKind::SingleMinded;
  if (name == "dirichlet-like") return ProfileKind::DirichletLike;
  if (name == "polarized") return ProfileKind::Polarized;
  throw InputError("unknown profile kind '" + std::string(name) + "'");
}

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::SingleMinded: return "single-minded";
    case ProfileKind::DirichletLike: return "dirichlet-like";
    case ProfileKind::Polarized: return "polarized";
  }
  return "?";
}

ProfileGenerator::ProfileGenerator(ProfileKind kind, std::size_t n, std::size_t m,
                                   std::uint64_t seed, long lattice)
    : kind_(kind), n_(n), m_(m), lattice_(lattice), rng_(seed) {
  if (n_ == 0 || m_ < 2) throw InputError("generator needs n >= 1 and m >= 2");
  if (lattice_ <= 0) throw InputError("lattice resolution must be positive");
}

Profile ProfileGenerator::next() {
  std::vector<Division> reports;
  reports.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    switch (kind_) {
      case ProfileKind::SingleMinded:
        reports.push_back(Division::unit(m_, uniform_index(rng_, m_)));
        break;
      case ProfileKind::DirichletLike:
        reports.push_back(random_lattice_division(rng_, m_, lattice_));
        break;
      case ProfileKind::Polarized:
        reports.push_back(Division::unit(m_, i < (n_ + 1) / 2 ? 0 : 1));
        break;
    }
  }
  return Profile(std::move(reports));
}

std::vector<Profile> generate_profiles(ProfileKind kind, std::size_t n, std::size_t m,
                                       std::uint64_t seed, std::size_t count, long lattice) {
  ProfileGenerator gen(kind, n, m, seed, lattice);
  std::vector<Profile> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(gen.next());
  return out;
}

Profile single_minded_profile(const std::vector<std::size_t>& counts) {
  std::vector<Division> reports;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    for (std::size_t c = 0; c < counts[j]; ++c) reports.push_back(Division::unit(counts.size(), j));
  }
  return Profile(std::move(reports));
}

}  // namespace budget
