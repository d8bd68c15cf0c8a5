#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "budget/core.hpp"
#include "budget/generate.hpp"
#include "budget/properties.hpp"

namespace budget {

enum class ProfileFormat { Json, Csv };

ProfileFormat parse_profile_format(std::string_view name);

/// A profile plus optional alternative labels and voter ids.
struct ProfileDocument {
  std::vector<std::string> labels;
  std::vector<std::string> voter_ids;
  Profile profile;
};

/// JSON: {"m": 3, "alternatives": [...], "voters": [{"id": "...", "report": ["0", "1/2", ...]}]}
/// CSV: one report per line; an optional first line of labels; '#' comments.
ProfileDocument parse_profile_document(std::string_view text, ProfileFormat format);
Profile parse_profile(std::string_view text, ProfileFormat format);

/// Emits exact fraction strings.
std::string serialize_profile(const ProfileDocument& doc, ProfileFormat format);
std::string serialize_profile(const Profile& profile, ProfileFormat format);

/// {"fraction": "2/5", "decimal": "0.4"}
nlohmann::json exact_json(const Rational& value);
nlohmann::json division_json(const Division& d);

struct RunConfig {
  std::string mechanism = "independent-markets";
  std::uint64_t seed = 1;
  std::size_t trials = 500;
  long grid = 20;
  double parimutuel_tolerance = 1e-10;
  // Random profiles for the axiom suite.
  ProfileKind profile_kind = ProfileKind::DirichletLike;
  std::size_t voters = 4;
  std::size_t alternatives = 3;
};

/// Outcome, t*/x* where applicable, distances, social cost, and the
/// rationality certificate for independent markets.
nlohmann::json run_mechanism(const RunConfig& config, const Profile& profile);

struct TrajectoryRow {
  Rational t;
  std::vector<Rational> phantoms;
  std::vector<Rational> medians;
  Rational median_sum;
};

struct TrajectoryTable {
  std::string system;
  Rational t_star;
  std::vector<TrajectoryRow> rows;
};

/// system: "independent-markets" or "utilitarian". Rows at i/samples for
/// i = 0..samples, every candidate breakpoint, and t*, sorted by t.
TrajectoryTable emit_trajectory(std::string_view system, const Profile& profile,
                                std::size_t samples);

/// Wide CSV: t, f_0..f_n, median_1..median_m, median_sum (decimals).
std::string trajectory_csv(const TrajectoryTable& table);
/// Long CSV: t, series, index, value.
std::string trajectory_long_csv(const TrajectoryTable& table);
nlohmann::json trajectory_json(const TrajectoryTable& table);

nlohmann::json report_json(const AxiomReport& report);
/// "incentive-compatibility independent-markets holds trials=500 seed=7"
std::string report_line(const AxiomReport& report);

struct SuiteEntry {
  AxiomReport report;
  bool claimed = false;
};

struct SuiteResult {
  std::vector<SuiteEntry> entries;
  /// 1 iff a claimed axiom has a counterexample, else 0.
  int exit_code = 0;
};

/// Axioms each registered mechanism is claimed to satisfy.
std::vector<Axiom> claimed_axioms(std::string_view mechanism);

/// Runs every checker against the configured mechanism on seeded random
/// profiles (plus `profile`, when given) and the fixed reference instances.
SuiteResult run_axiom_suite(const RunConfig& config, const std::optional<Profile>& profile = {});

nlohmann::json suite_json(const RunConfig& config, const SuiteResult& result);
std::string suite_lines(const SuiteResult& result);

}  // namespace budget
