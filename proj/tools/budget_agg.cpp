#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "budget/io.hpp"
#include "budget/mechanisms.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCounterexample = 1;
constexpr int kInputError = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BUDGET_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "ignoring BUDGET_SEED='" << env << "'\n";
    }
  }
  return 1;
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path);
  if (!in) throw budget::InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

budget::ProfileFormat guess_format(const std::string& flag, const std::string& path) {
  if (!flag.empty()) return budget::parse_profile_format(flag);
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") return budget::ProfileFormat::Csv;
  return budget::ProfileFormat::Json;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw budget::InputError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget aggregation with moving phantom mechanisms"};
  app.require_subcommand(1);

  budget::RunConfig config;
  config.seed = default_seed();
  std::string input;
  std::string format;
  std::string out;
  std::string kind = "dirichlet-like";
  std::string layout = "wide";
  std::size_t samples = 20;
  std::size_t count = 1;
  bool lines = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mechanism", config.mechanism, "mechanism id")->capture_default_str();
    sub->add_option("--input", input, "profile file, '-' for stdin");
    sub->add_option("--format", format, "json or csv");
    sub->add_option("--seed", config.seed, "random seed (default: $BUDGET_SEED or 1)");
    sub->add_option("--trials", config.trials, "random trials")->capture_default_str();
    sub->add_option("--grid", config.grid, "lattice resolution")->capture_default_str();
    sub->add_option("--out", out, "output file (default stdout)");
  };

  auto* run = app.add_subcommand("run", "aggregate a profile");
  add_common(run);
  run->add_option("--tolerance", config.parimutuel_tolerance, "parimutuel stopping tolerance");

  auto* axioms = app.add_subcommand("axioms", "property-test a mechanism");
  add_common(axioms);
  axioms->add_option("--kind", kind, "random profile family: single-minded, dirichlet-like, polarized");
  axioms->add_option("--voters", config.voters)->capture_default_str();
  axioms->add_option("--alternatives", config.alternatives)->capture_default_str();
  axioms->add_flag("--lines", lines, "one text line per axiom instead of JSON");

  auto* trajectory = app.add_subcommand("trajectory", "tabulate phantom positions and medians");
  add_common(trajectory);
  trajectory->add_option("--samples", samples)->capture_default_str();
  trajectory->add_option("--layout", layout, "wide, long or json")->capture_default_str();

  auto* generate = app.add_subcommand("generate", "emit random profiles");
  add_common(generate);
  generate->add_option("--kind", kind)->capture_default_str();
  generate->add_option("--voters", config.voters)->capture_default_str();
  generate->add_option("--alternatives", config.alternatives)->capture_default_str();
  generate->add_option("--count", count)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (run->parsed()) {
      const auto fmt = guess_format(format, input);
      const auto profile = budget::parse_profile(read_input(input), fmt);
      write_output(out, budget::run_mechanism(config, profile).dump(2) + "\n");
      return kOk;
    }
    if (axioms->parsed()) {
      budget::find_mechanism(config.mechanism);
      config.profile_kind = budget::parse_profile_kind(kind);
      std::optional<budget::Profile> profile;
      if (!input.empty()) profile = budget::parse_profile(read_input(input), guess_format(format, input));
      const auto result = budget::run_axiom_suite(config, profile);
      write_output(out, lines ? budget::suite_lines(result)
                              : budget::suite_json(config, result).dump(2) + "\n");
      return result.exit_code == 0 ? kOk : kCounterexample;
    }
    if (trajectory->parsed()) {
      const auto profile = budget::parse_profile(read_input(input), guess_format(format, input));
      const auto table = budget::emit_trajectory(config.mechanism, profile, samples);
      if (layout == "wide") {
        write_output(out, budget::trajectory_csv(table));
      } else if (layout == "long") {
        write_output(out, budget::trajectory_long_csv(table));
      } else if (layout == "json") {
        write_output(out, budget::trajectory_json(table).dump(2) + "\n");
      } else {
        throw budget::InputError("unknown layout '" + layout + "'");
      }
      return kOk;
    }
    if (generate->parsed()) {
      const auto fmt = format.empty() ? budget::ProfileFormat::Json : budget::parse_profile_format(format);
      if (count > 1 && fmt == budget::ProfileFormat::Csv) {
        throw budget::InputError("csv output holds a single profile; use --count 1");
      }
      budget::ProfileGenerator gen(budget::parse_profile_kind(kind), config.voters,
                                   config.alternatives, config.seed, config.grid);
      if (count == 1) {
        write_output(out, budget::serialize_profile(gen.next(), fmt));
      } else {
        auto all = nlohmann::json::array();
        for (std::size_t k = 0; k < count; ++k) {
          all.push_back(nlohmann::json::parse(budget::serialize_profile(gen.next(), fmt)));
        }
        write_output(out, all.dump(2) + "\n");
      }
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
