#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "cvsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitDisagreement = 4;

int run_command(const std::string& scenario_ref, const std::string& engine_flag,
                std::int64_t shots_flag, std::int64_t seed_flag,
                const std::string& out_path, const std::string& format) {
  cvsim::Scenario scenario = cvsim::resolve_scenario(scenario_ref);
  if (!engine_flag.empty()) {
    if (engine_flag == "covariance") {
      scenario.engine = cvsim::Engine::Covariance;
    } else if (engine_flag == "montecarlo") {
      scenario.engine = cvsim::Engine::MonteCarlo;
    } else if (engine_flag == "both") {
      scenario.engine = cvsim::Engine::Both;
    } else {
      throw cvsim::ConfigError("--engine must be covariance, montecarlo or both");
    }
  }
  if (shots_flag > 0) {
    scenario.shots = shots_flag;
  }
  if (seed_flag >= 0) {
    scenario.seed = static_cast<std::uint64_t>(seed_flag);
  }

  std::vector<cvsim::ResultRow> rows = cvsim::run_scenario(scenario);
  const std::string table = format == "json" ? cvsim::to_json(scenario, rows)
                                             : cvsim::to_csv(rows);
  std::cout << table;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      throw cvsim::ConfigError("cannot write output file '" + out_path + "'");
    }
    out << table;
  }

  if (scenario.engine == cvsim::Engine::Both) {
    cvsim::EngineComparison comparison = cvsim::compare_engines(rows);
    if (!comparison.ok) {
      for (const std::string& line : comparison.disagreements) {
        std::cerr << "engine disagreement: " << line << "\n";
      }
      return kExitDisagreement;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian simulator of a measurement-based controlled-phase gate"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::string engine_flag;
  std::int64_t shots_flag = 0;
  std::int64_t seed_flag = -1;
  std::string out_path;
  std::string format = "csv";

  CLI::App* run = app.add_subcommand("run", "Run a scenario and print its result table");
  run->add_option("--scenario", scenario_ref,
                  "Scenario file path or bundled scenario name")
      ->required();
  run->add_option("--engine", engine_flag, "covariance, montecarlo or both");
  run->add_option("--shots", shots_flag, "Monte Carlo shot count override");
  run->add_option("--seed", seed_flag, "Monte Carlo seed override");
  run->add_option("--out", out_path, "Also write the table to this file");
  run->add_option("--format", format, "csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* list = app.add_subcommand("list-scenarios", "List bundled scenarios");

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate", "Validate a scenario file");
  validate->add_option("path", validate_path, "Scenario file to check")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      return run_command(scenario_ref, engine_flag, shots_flag, seed_flag,
                         out_path, format);
    }
    if (list->parsed()) {
      for (const auto& [name, text] : cvsim::bundled_scenarios()) {
        (void)text;
        std::cout << name << "\n";
      }
      return kExitOk;
    }
    if (validate->parsed()) {
      cvsim::Scenario scenario = cvsim::load_scenario_file(validate_path);
      std::cout << "ok: scenario '" << scenario.name << "' is valid\n";
      return kExitOk;
    }
  } catch (const cvsim::PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << "\n";
    return kExitPhysics;
  } catch (const cvsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPhysics;
  }
  return kExitOk;
}
