// obstacle: command line front end of the exact and lattice engines.
//
//   obstacle run <config> [--out DIR] [--format csv|json]
//   obstacle counterexample [--periods K] [--dx D] [--n N] [--out DIR]
//   obstacle verify [--suite NAME] [--seed S] [--restitution H] [--out DIR]
//   obstacle compare --config <cfg> --dx-list D1 D2 ... [--offsets M] [--out DIR]
//
// Exit codes: 0 every check passed, 1 a check failed or an engine error,
// 2 bad input.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "obstacle/config.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/report.hpp"
#include "obstacle/runner.hpp"
#include "obstacle/verify.hpp"

namespace {

using namespace obstacle;

void print_summary(const RunReport& rep, std::ostream& out) {
  out << rep.kind << " " << rep.name;
  if (!rep.config_hash.empty()) out << " config " << rep.config_hash;
  if (rep.seed) out << " seed " << *rep.seed;
  out << "\n";
  for (const auto& c : rep.checks()) {
    out << "  " << std::left << std::setw(8) << to_string(c.status) << std::setw(40) << c.name;
    if (c.status != CheckStatus::skipped) {
      out << " " << std::setprecision(6) << c.worst << " (limit " << c.tolerance << ")";
    }
    if (!c.detail.empty()) out << "  " << c.detail;
    out << "\n";
  }
  out << (rep.passed() ? "PASS" : "FAIL") << " in " << std::fixed << std::setprecision(2)
      << rep.seconds << " s\n";
  out.unsetf(std::ios::fixed);
}

void write_report(const RunReport& rep, const std::string& dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream(std::filesystem::path(dir) / "report.json") << rep.to_json(false).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave equation with a unilateral obstacle: exact and lattice engines"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format;
  auto* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("config", config_path, "Scenario JSON")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the file)");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  CounterexampleOptions cex;
  auto* counter = app.add_subcommand("counterexample", "Sine velocity scenario: growth and falsification");
  counter->add_option("--periods", cex.periods, "Periods K")->check(CLI::PositiveNumber);
  counter->add_option("--dx", cex.dx, "Lattice spacing")->check(CLI::PositiveNumber);
  counter->add_option("--n", cex.N, "Cells of the sine velocity")->check(CLI::PositiveNumber);
  counter->add_option("--out", cex.output_dir, "Output directory");

  VerifyOptions vopt;
  std::string verify_out;
  auto* ver = app.add_subcommand("verify", "Run the property suites");
  std::vector<std::string> names{"all", "oracle"};
  for (const auto& s : verify_suites()) names.emplace_back(s.name);
  ver->add_option("--suite", vopt.suite, "Suite name or all")->check(CLI::IsMember(names));
  ver->add_option("--seed", vopt.seed, "Seed of the random scenarios");
  ver->add_option("--restitution", vopt.restitution, "Energy suite: h alone")->check(CLI::Range(0.0, 1.0));
  ver->add_option("--out", verify_out, "Directory for report.json");

  CompareOptions copt;
  std::string compare_config;
  auto* cmp = app.add_subcommand("compare", "Lattice against the exact engine over several dx");
  cmp->add_option("--config", compare_config, "Scenario JSON")->required();
  cmp->add_option("--dx-list", copt.dx_list, "Spacings")->required()->check(CLI::PositiveNumber);
  cmp->add_option("--offsets", copt.offsets, "Grid offsets averaged per dx")->check(CLI::PositiveNumber);
  cmp->add_option("--out", copt.output_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::optional<RunReport> rep;
    if (*run) {
      ScenarioConfig cfg = load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!format.empty()) cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
      rep = run_scenario(cfg);
    } else if (*counter) {
      rep = run_counterexample(cex);
    } else if (*ver) {
      rep = verify(vopt);
      write_report(*rep, verify_out);
    } else if (*cmp) {
      rep = compare(load_config(compare_config), copt);
    }
    print_summary(*rep, std::cout);
    return exit_code(*rep);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return 2;
  } catch (const EngineError& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return 1;
  }
}
