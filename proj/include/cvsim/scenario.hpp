#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cvsim/cluster.hpp"
#include "cvsim/modes.hpp"

namespace cvsim {

/// Malformed or schema-violating configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well-formed configuration describing impossible physics (exit code 3).
struct PhysicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputSpec {
  enum class Kind { Vacuum, Coherent, CoherentPower };
  Kind kind = Kind::Vacuum;
  double mean_x = 0.0;      // Coherent
  double mean_p = 0.0;      // Coherent
  Quadrature quadrature = Quadrature::X;  // CoherentPower
  double power_db = 0.0;                  // CoherentPower
};

enum class Engine { Covariance, MonteCarlo, Both };

/// One reproducible run of the gate pipeline: resource squeezing, inputs,
/// losses, witness gains and engine selection. Parsed from a JSON document
/// with a `version` field; bundled scenarios double as golden tests.
struct Scenario {
  std::string name;
  Eigen::Vector4d squeezing_db = Eigen::Vector4d::Zero();
  ClusterConstruction construction = ClusterConstruction::ExperimentalNullifiers;
  InputSpec alpha;
  InputSpec beta;
  Eigen::Vector4d cluster_loss = Eigen::Vector4d::Ones();  // efficiency per C1..C4
  Eigen::Vector2d output_loss = Eigen::Vector2d::Ones();   // efficiency mu, nu
  std::vector<double> gains;
  Engine engine = Engine::Covariance;
  std::int64_t shots = 100000;
  std::uint64_t seed = 1;
  bool emit_threshold = false;
};

/// Parse and validate a scenario document. Throws ConfigError on schema
/// problems (with a field path in the message) and PhysicsError on valid
/// documents describing impossible physics.
Scenario parse_scenario(const std::string& json_text);

/// parse_scenario over a file. Throws ConfigError when unreadable.
Scenario load_scenario_file(const std::string& path);

/// Bundled scenarios compiled into the library, keyed by name.
const std::map<std::string, std::string_view>& bundled_scenarios();

/// Resolve `ref` as a file path first, then as a bundled scenario name.
Scenario resolve_scenario(const std::string& ref);

struct ResultRow {
  std::string quantity;
  std::string engine;  // "covariance" or "montecarlo"
  double value = 0.0;
  std::string unit;    // mean | variance | db_rel_snl | verdict | gain | ratio
  double err = 0.0;
  bool has_err = false;
};

/// Execute the scenario's engine(s) and emit the result table: output means,
/// variances, dB and power levels, witness rows per gain, and threshold rows
/// when requested.
std::vector<ResultRow> run_scenario(const Scenario& scenario);

struct EngineComparison {
  bool ok = true;
  std::vector<std::string> disagreements;
};

/// Check every Monte Carlo mean/variance/witness row against its covariance
/// counterpart within 5 standard errors.
EngineComparison compare_engines(const std::vector<ResultRow>& rows);

/// CSV with header quantity,engine,value,unit,err. Floats are printed with
/// shortest round-trip formatting, so re-parsing reproduces exact values.
std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_result_csv(const std::string& text);

/// JSON document with the rows plus reproducibility metadata.
std::string to_json(const Scenario& scenario,
                    const std::vector<ResultRow>& rows);

std::string format_double(double v);

}  // namespace cvsim
