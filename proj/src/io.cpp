#include "budget/io.hpp"

#include <algorithm>
#include <sstream>

#include "budget/market.hpp"
#include "budget/mechanisms.hpp"
#include "budget/phantoms.hpp"

namespace budget {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string voter_name(const std::vector<std::string>& ids, std::size_t i) {
  if (i < ids.size() && !ids[i].empty()) return "voter '" + ids[i] + "'";
  return "voter " + std::to_string(i + 1);
}

Division build_row(const std::vector<Rational>& row, std::size_t m, const std::string& who) {
  if (row.size() != m) {
    throw InputError(who + " has " + std::to_string(row.size()) + " entries, expected " +
                     std::to_string(m));
  }
  try {
    return Division(row);
  } catch (const InvalidDivision& e) {
    throw InputError(who + ": " + e.what());
  }
}

Rational json_number(const json& v, const std::string& who) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.dump());
  if (v.is_number_float()) return parse_rational(v.dump());
  throw InputError(who + ": report entries must be numbers or number strings");
}

}  // namespace

ProfileFormat parse_profile_format(std::string_view name) {
  if (name == "json") return ProfileFormat::Json;
  if (name == "csv") return ProfileFormat::Csv;
  throw InputError("unknown format '" + std::string(name) + "' (expected json or csv)");
}

ProfileDocument parse_profile_document(std::string_view text, ProfileFormat format) {
  std::vector<std::string> labels;
  std::vector<std::string> ids;
  std::vector<std::vector<Rational>> rows;

  if (format == ProfileFormat::Csv) {
    std::stringstream ss{std::string(text)};
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      auto cells = split_csv(line);
      std::vector<Rational> row;
      try {
        for (const auto& c : cells) row.push_back(parse_rational(c));
      } catch (const InputError& e) {
        if (first) {
          labels = cells;
          first = false;
          continue;
        }
        throw InputError(voter_name(ids, rows.size()) + ": " + e.what());
      }
      first = false;
      rows.push_back(std::move(row));
    }
  } else {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("voters") || !doc["voters"].is_array()) {
      throw InputError("profile JSON needs a \"voters\" array");
    }
    if (doc.contains("alternatives")) {
      for (const auto& l : doc["alternatives"]) labels.push_back(l.get<std::string>());
    }
    for (const auto& v : doc["voters"]) {
      const json* report = &v;
      std::string id;
      if (v.is_object()) {
        if (!v.contains("report")) throw InputError("voter entry without \"report\"");
        report = &v["report"];
        if (v.contains("id")) id = v["id"].is_string() ? v["id"].get<std::string>() : v["id"].dump();
      }
      ids.push_back(id);
      if (!report->is_array()) throw InputError(voter_name(ids, rows.size()) + ": report must be an array");
      std::vector<Rational> row;
      for (const auto& x : *report) row.push_back(json_number(x, voter_name(ids, rows.size())));
      rows.push_back(std::move(row));
    }
    if (doc.contains("m")) {
      const auto m = doc["m"].get<std::size_t>();
      if (!rows.empty() && rows.front().size() != m) {
        throw InputError("declared m = " + std::to_string(m) + " but voter 1 reports " +
                         std::to_string(rows.front().size()) + " entries");
      }
    }
  }

  if (rows.empty()) throw InputError("profile has no voters");
  const std::size_t m = rows.front().size();
  if (!labels.empty() && labels.size() != m) {
    throw InputError("got " + std::to_string(labels.size()) + " labels for " + std::to_string(m) +
                     " alternatives");
  }
  std::vector<Division> reports;
  for (std::size_t i = 0; i < rows.size(); ++i) reports.push_back(build_row(rows[i], m, voter_name(ids, i)));
  bool any_id = std::any_of(ids.begin(), ids.end(), [](const auto& s) { return !s.empty(); });
  if (!any_id) ids.clear();
  return {std::move(labels), std::move(ids), Profile(std::move(reports))};
}

Profile parse_profile(std::string_view text, ProfileFormat format) {
  return parse_profile_document(text, format).profile;
}

std::string serialize_profile(const ProfileDocument& doc, ProfileFormat format) {
  const Profile& p = doc.profile;
  if (format == ProfileFormat::Csv) {
    std::ostringstream os;
    for (std::size_t j = 0; j < doc.labels.size(); ++j) os << (j ? "," : "") << doc.labels[j];
    if (!doc.labels.empty()) os << '\n';
    for (const auto& r : p.reports()) {
      for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << to_fraction(r[j]);
      os << '\n';
    }
    return os.str();
  }
  json out;
  out["m"] = p.alternatives();
  if (!doc.labels.empty()) out["alternatives"] = doc.labels;
  out["voters"] = json::array();
  for (std::size_t i = 0; i < p.voters(); ++i) {
    json v;
    if (i < doc.voter_ids.size()) v["id"] = doc.voter_ids[i];
    json report = json::array();
    for (const auto& w : p[i].weights()) report.push_back(to_fraction(w));
    v["report"] = std::move(report);
    out["voters"].push_back(std::move(v));
  }
  return out.dump(2) + "\n";
}

std::string serialize_profile(const Profile& profile, ProfileFormat format) {
  return serialize_profile(ProfileDocument{{}, {}, profile}, format);
}

json exact_json(const Rational& value) {
  return {{"fraction", to_fraction(value)}, {"decimal", to_decimal(value)}};
}

json division_json(const Division& d) {
  json out = json::array();
  for (const auto& w : d.weights()) out.push_back(exact_json(w));
  return out;
}

json run_mechanism(const RunConfig& config, const Profile& profile) {
  const Mechanism mechanism = find_mechanism(config.mechanism);
  json out;
  out["mechanism"] = mechanism.id;
  out["voters"] = profile.voters();
  out["alternatives"] = profile.alternatives();

  std::optional<Division> outcome;
  if (mechanism.id == "parimutuel") {
    auto result = parimutuel_consensus(profile, config.parimutuel_tolerance);
    out["iterations"] = result.iterations;
    out["prices"] = result.prices;
    outcome = parimutuel_exact(profile);
  } else if (mechanism.id == "independent-markets") {
    const PhantomSystem system = im_phantom_system(profile.voters());
    const Rational t = solve_t_star(system, profile);
    outcome = aggregate_at(system, profile, t);
    out["t_star"] = exact_json(t);
    out["x_star"] = exact_json(Rational(profile.voters()) / t);
    const DemanderSets cert = verify_lp_certificate(profile, *outcome);
    json c;
    c["z"] = exact_json(cert.z);
    c["epsilon"] = exact_json(cert.epsilon);
    c["demanders"] = cert.demanders;
    c["boundary"] = cert.boundary;
    c["exact_equality"] = cert.exact_equality;
    out["lp_certificate"] = std::move(c);
  } else if (mechanism.id == "utilitarian") {
    const WaterFillResult fill = water_fill(welfare_band(profile));
    outcome = fill.outcome;
    out["t_star"] = exact_json(solve_t_star(fstar_phantom_system(profile.voters()), profile));
    out["water_level"] = exact_json(fill.level);
    out["welfare_band"] = {{"pivot", fill.band.pivot},
                           {"lower", json::array()},
                           {"upper", json::array()}};
    for (std::size_t j = 0; j < fill.band.lower.size(); ++j) {
      out["welfare_band"]["lower"].push_back(exact_json(fill.band.lower[j]));
      out["welfare_band"]["upper"].push_back(exact_json(fill.band.upper[j]));
    }
  } else {
    outcome = mechanism.run(profile);
  }

  out["outcome"] = division_json(*outcome);
  json distances = json::array();
  for (const auto& r : profile.reports()) distances.push_back(exact_json(l1_distance(*outcome, r)));
  out["distances"] = std::move(distances);
  out["social_cost"] = exact_json(social_cost(profile, *outcome));
  return out;
}

TrajectoryTable emit_trajectory(std::string_view system_id, const Profile& profile,
                                std::size_t samples) {
  const std::size_t n = profile.voters();
  std::optional<PhantomSystem> system;
  if (system_id == "independent-markets" || system_id == "im") {
    system = im_phantom_system(n);
  } else if (system_id == "utilitarian" || system_id == "fstar") {
    system = fstar_phantom_system(n);
  } else {
    throw InputError("no phantom system for '" + std::string(system_id) + "'");
  }
  if (samples == 0) samples = 1;

  TrajectoryTable table;
  table.system = std::string(system_id);
  table.t_star = solve_t_star(*system, profile);
  std::vector<Rational> times = candidate_times(*system, profile);
  for (std::size_t i = 0; i <= samples; ++i) {
    times.push_back(make_rational(static_cast<long>(i), static_cast<long>(samples)));
  }
  times.push_back(table.t_star);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  for (const auto& t : times) {
    TrajectoryRow row;
    row.t = t;
    row.phantoms = eval_phantoms(*system, t).positions;
    row.medians = medians_at(*system, profile, t);
    row.median_sum = 0;
    for (const auto& v : row.medians) row.median_sum += v;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string trajectory_csv(const TrajectoryTable& table) {
  std::ostringstream os;
  if (table.rows.empty()) return {};
  const auto& first = table.rows.front();
  os << 't';
  for (std::size_t k = 0; k < first.phantoms.size(); ++k) os << ",f" << k;
  for (std::size_t j = 0; j < first.medians.size(); ++j) os << ",median" << j + 1;
  os << ",median_sum\n";
  for (const auto& r : table.rows) {
    os << to_decimal(r.t);
    for (const auto& f : r.phantoms) os << ',' << to_decimal(f);
    for (const auto& v : r.medians) os << ',' << to_decimal(v);
    os << ',' << to_decimal(r.median_sum) << '\n';
  }
  return os.str();
}

std::string trajectory_long_csv(const TrajectoryTable& table) {
  std::ostringstream os;
  os << "t,series,index,value\n";
  for (const auto& r : table.rows) {
    const std::string t = to_decimal(r.t);
    for (std::size_t k = 0; k < r.phantoms.size(); ++k) {
      os << t << ",phantom," << k << ',' << to_decimal(r.phantoms[k]) << '\n';
    }
    for (std::size_t j = 0; j < r.medians.size(); ++j) {
      os << t << ",median," << j + 1 << ',' << to_decimal(r.medians[j]) << '\n';
    }
    os << t << ",median_sum,," << to_decimal(r.median_sum) << '\n';
  }
  return os.str();
}

json trajectory_json(const TrajectoryTable& table) {
  json out;
  out["system"] = table.system;
  out["t_star"] = exact_json(table.t_star);
  out["rows"] = json::array();
  for (const auto& r : table.rows) {
    json row;
    row["t"] = exact_json(r.t);
    row["phantoms"] = json::array();
    for (const auto& f : r.phantoms) row["phantoms"].push_back(exact_json(f));
    row["medians"] = json::array();
    for (const auto& v : r.medians) row["medians"].push_back(exact_json(v));
    row["median_sum"] = exact_json(r.median_sum);
    out["rows"].push_back(std::move(row));
  }
  return out;
}

json report_json(const AxiomReport& report) {
  json out;
  out["axiom"] = std::string(to_string(report.axiom));
  out["mechanism"] = report.mechanism;
  out["verdict"] = std::string(to_string(report.verdict));
  out["trials"] = report.trials;
  out["seed"] = report.seed;
  out["established"] = report.established;
  if (report.counterexample) {
    const Counterexample& ce = *report.counterexample;
    json c;
    c["profile"] = json::parse(serialize_profile(ce.profile, ProfileFormat::Json));
    if (ce.modified) c["modified"] = json::parse(serialize_profile(*ce.modified, ProfileFormat::Json));
    if (ce.other) c["other"] = json::parse(serialize_profile(*ce.other, ProfileFormat::Json));
    c["voter"] = ce.voter;
    c["alternative"] = ce.alternative;
    if (!ce.permutation.empty()) c["permutation"] = ce.permutation;
    c["outcome"] = division_json(ce.outcome);
    if (ce.witness) c["witness"] = division_json(*ce.witness);
    c["before"] = exact_json(ce.before);
    c["after"] = exact_json(ce.after);
    out["counterexample"] = std::move(c);
  }
  return out;
}

std::string report_line(const AxiomReport& report) {
  std::ostringstream os;
  os << to_string(report.axiom) << ' ' << report.mechanism << ' ' << to_string(report.verdict)
     << " trials=" << report.trials << " seed=" << report.seed;
  if (report.counterexample) {
    os << " before=" << to_fraction(report.counterexample->before)
       << " after=" << to_fraction(report.counterexample->after);
  }
  return os.str();
}

std::vector<Axiom> claimed_axioms(std::string_view mechanism) {
  using A = Axiom;
  if (mechanism == "independent-markets") {
    return {A::IncentiveCompatibility, A::Proportionality, A::Monotonicity, A::Participation,
            A::Reinforcement, A::Anonymity, A::Neutrality};
  }
  if (mechanism == "utilitarian") {
    return {A::IncentiveCompatibility, A::ParetoOptimality, A::Monotonicity, A::Participation,
            A::Reinforcement, A::RangeRespecting, A::Anonymity, A::Neutrality};
  }
  if (mechanism == "uniform-phantom") {
    return {A::IncentiveCompatibility, A::ParetoOptimality, A::Proportionality, A::Monotonicity,
            A::Participation, A::Reinforcement, A::RangeRespecting, A::Anonymity, A::Neutrality};
  }
  if (mechanism == "moulin") {
    return {A::IncentiveCompatibility, A::ParetoOptimality, A::Monotonicity, A::RangeRespecting,
            A::Anonymity, A::Neutrality};
  }
  if (mechanism == "mean") {
    return {A::Proportionality, A::Monotonicity, A::Participation, A::Reinforcement,
            A::RangeRespecting, A::Anonymity, A::Neutrality};
  }
  if (mechanism == "parimutuel") return {A::Proportionality, A::Anonymity, A::Neutrality};
  throw InputError("unknown mechanism '" + std::string(mechanism) + "'");
}

namespace {

Profile profile_of(std::initializer_list<std::initializer_list<const char*>> rows) {
  std::vector<Division> reports;
  for (const auto& row : rows) {
    std::vector<Rational> w;
    for (const char* s : row) w.push_back(parse_rational(s));
    reports.emplace_back(std::move(w));
  }
  return Profile(std::move(reports));
}

void merge(AxiomReport& into, AxiomReport one) {
  if (one.verdict == Verdict::Vacuous) return;
  into.trials += one.trials;
  if (into.verdict != Verdict::Violated && one.verdict == Verdict::Violated) {
    into.verdict = Verdict::Violated;
    into.counterexample = std::move(one.counterexample);
  }
  if (into.established.empty()) into.established = one.established;
}

}  // namespace

SuiteResult run_axiom_suite(const RunConfig& config, const std::optional<Profile>& profile) {
  const Mechanism mechanism = find_mechanism(config.mechanism);
  const bool binary_only = mechanism.id == "uniform-phantom" || mechanism.id == "moulin";
  const std::size_t m = binary_only ? 2 : config.alternatives;

  std::vector<Profile> randoms;
  if (profile) randoms.push_back(*profile);
  const std::size_t per_profile = 10;
  const std::size_t count = std::max<std::size_t>(1, config.trials / per_profile);
  ProfileGenerator gen(config.profile_kind, config.voters, m, config.seed, config.grid);
  for (std::size_t k = 0; k < count; ++k) randoms.push_back(gen.next());

  // Reference instances: a dominated 2-voter outcome, a 3-voter worked
  // profile, the parimutuel manipulation, and the lopsided mean.
  std::vector<Profile> references;
  if (!binary_only) {
    references.push_back(profile_of({{"0.8", "0.2", "0"}, {"0.8", "0", "0.2"}}));
    references.push_back(profile_of({{"0", "0.5", "0.5"}, {"0.5", "0.5", "0"}, {"0.9", "0", "0.1"}}));
    references.push_back(profile_of({{"0", "0.5", "0.5"}, {"0.5", "0.5", "0"}}));
  }
  references.push_back(profile_of({{"0.6", "0.4"}, {"0", "1"}, {"0", "1"}}));

  auto blank = [&](Axiom a) {
    AxiomReport r;
    r.axiom = a;
    r.mechanism = mechanism.id;
    r.seed = config.seed;
    return r;
  };
  AxiomReport ic = blank(Axiom::IncentiveCompatibility), pareto = blank(Axiom::ParetoOptimality),
              prop = blank(Axiom::Proportionality), mono = blank(Axiom::Monotonicity),
              part = blank(Axiom::Participation), reinf = blank(Axiom::Reinforcement),
              range = blank(Axiom::RangeRespecting), anon = blank(Axiom::Anonymity),
              neut = blank(Axiom::Neutrality);

  for (const auto& p : references) {
    merge(ic, check_incentive_compatibility_structured(mechanism, p));
    merge(range, check_range_respecting(mechanism, p));
    merge(pareto, check_pareto(p, mechanism.run(p), GridSpec{config.grid, p.alternatives()},
                               mechanism.id));
  }

  std::uint64_t sub = config.seed * 1000003ULL;
  Rng rng(config.seed);
  for (const auto& p : randoms) {
    ++sub;
    merge(ic, check_incentive_compatibility(mechanism, p, MisreportStrategy::Mixed, per_profile, sub));
    merge(mono, check_monotonicity(mechanism, p, per_profile, sub));
    if (p.voters() >= 2) merge(part, check_participation(mechanism, p, uniform_index(rng, p.voters())));
    merge(reinf, check_reinforcement(mechanism, p, p));
    merge(reinf, check_reinforcement(mechanism, p,
                                     p.permute_voters(random_permutation(rng, p.voters()))));
    merge(range, check_range_respecting(mechanism, p));
    auto sym = check_symmetries(mechanism, p, 2, sub);
    merge(anon, std::move(sym.anonymity));
    merge(neut, std::move(sym.neutrality));
    GridSpec grid{config.grid, p.alternatives()};
    if (grid.count() <= grid.cap) merge(pareto, check_pareto(p, mechanism.run(p), grid, mechanism.id));

    std::vector<std::size_t> counts(m, 0);
    for (std::size_t i = 0; i < p.voters(); ++i) ++counts[uniform_index(rng, m)];
    merge(prop, check_proportionality(mechanism, counts));
  }
  merge(prop, check_proportionality(mechanism, {100, 99}));
  if (!binary_only) merge(prop, check_proportionality(mechanism, {6, 3, 1}));

  SuiteResult result;
  const auto claims = claimed_axioms(mechanism.id);
  for (AxiomReport* r : {&ic, &pareto, &prop, &mono, &part, &reinf, &range, &anon, &neut}) {
    const bool claimed = std::find(claims.begin(), claims.end(), r->axiom) != claims.end();
    if (claimed && r->verdict == Verdict::Violated) result.exit_code = 1;
    result.entries.push_back({std::move(*r), claimed});
  }
  return result;
}

json suite_json(const RunConfig& config, const SuiteResult& result) {
  json out;
  out["mechanism"] = config.mechanism;
  out["seed"] = config.seed;
  out["trials"] = config.trials;
  out["axioms"] = json::array();
  for (const auto& e : result.entries) {
    json r = report_json(e.report);
    r["claimed"] = e.claimed;
    out["axioms"].push_back(std::move(r));
  }
  out["exit_code"] = result.exit_code;
  return out;
}

std::string suite_lines(const SuiteResult& result) {
  std::ostringstream os;
  for (const auto& e : result.entries) {
    os << report_line(e.report) << (e.claimed ? " claimed" : " not-claimed") << '\n';
  }
  return os.str();
}

}  // namespace budget
