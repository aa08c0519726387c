#include "cvsim/scenario.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cvsim/analysis.hpp"
#include "cvsim/cz_gate.hpp"
#include "cvsim/montecarlo.hpp"

namespace cvsim {

namespace {

using nlohmann::json;

constexpr double kVacuumVariance = 0.25;

double require_number(const json& node, const std::string& path) {
  if (!node.is_number()) {
    throw ConfigError(fmt::format("{}: expected a number", path));
  }
  const double v = node.get<double>();
  if (!std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: value must be finite", path));
  }
  return v;
}

double require_efficiency(const json& node, const std::string& path) {
  const double eta = require_number(node, path);
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw PhysicsError(
        fmt::format("{}: efficiency {} outside [0, 1]", path, eta));
  }
  return eta;
}

InputSpec parse_input(const json& node, const std::string& path) {
  if (!node.is_object()) {
    throw ConfigError(fmt::format("{}: expected an object", path));
  }
  if (!node.contains("type") || !node["type"].is_string()) {
    throw ConfigError(fmt::format("{}.type: expected a string", path));
  }
  const std::string type = node["type"].get<std::string>();
  InputSpec spec;
  if (type == "vacuum") {
    spec.kind = InputSpec::Kind::Vacuum;
  } else if (type == "coherent") {
    spec.kind = InputSpec::Kind::Coherent;
    spec.mean_x = node.contains("mean_x")
                      ? require_number(node["mean_x"], path + ".mean_x")
                      : 0.0;
    spec.mean_p = node.contains("mean_p")
                      ? require_number(node["mean_p"], path + ".mean_p")
                      : 0.0;
  } else if (type == "coherent_power") {
    spec.kind = InputSpec::Kind::CoherentPower;
    if (!node.contains("quadrature") || !node["quadrature"].is_string()) {
      throw ConfigError(fmt::format("{}.quadrature: expected \"x\" or \"p\"", path));
    }
    const std::string quad = node["quadrature"].get<std::string>();
    if (quad == "x") {
      spec.quadrature = Quadrature::X;
    } else if (quad == "p") {
      spec.quadrature = Quadrature::P;
    } else {
      throw ConfigError(
          fmt::format("{}.quadrature: unknown quadrature '{}'", path, quad));
    }
    if (!node.contains("power_db")) {
      throw ConfigError(fmt::format("{}.power_db: missing", path));
    }
    spec.power_db = require_number(node["power_db"], path + ".power_db");
    if (std::pow(10.0, spec.power_db / 10.0) < 1.0) {
      throw PhysicsError(fmt::format(
          "{}.power_db: {} dB is below the shot noise level", path,
          spec.power_db));
    }
  } else {
    throw ConfigError(fmt::format("{}.type: unknown input type '{}'", path, type));
  }
  return spec;
}

Eigen::Vector4d input_means(const Scenario& sc) {
  auto means = [](const InputSpec& in) -> std::pair<double, double> {
    switch (in.kind) {
      case InputSpec::Kind::Vacuum:
        return {0.0, 0.0};
      case InputSpec::Kind::Coherent:
        return {in.mean_x, in.mean_p};
      case InputSpec::Kind::CoherentPower: {
        const double amplitude = power_db_to_mean(in.power_db);
        return in.quadrature == Quadrature::X
                   ? std::pair<double, double>{amplitude, 0.0}
                   : std::pair<double, double>{0.0, amplitude};
      }
    }
    return {0.0, 0.0};
  };
  auto [xa, pa] = means(sc.alpha);
  auto [xb, pb] = means(sc.beta);
  Eigen::Vector4d v;
  v << xa, pa, xb, pb;
  return v;
}

std::string gain_tag(double g) { return fmt::format("[g={}]", format_double(g)); }

void emit_quadrature_rows(std::vector<ResultRow>& rows, const std::string& engine,
                          const std::string& name, double mean, double mean_err,
                          double var, double var_err, bool has_err) {
  rows.push_back({"mean_" + name, engine, mean, "mean", mean_err, has_err});
  rows.push_back({"var_" + name, engine, var, "variance", var_err, has_err});
  // Derived dB rows; errors propagate through d(dB)/d(var) = 10/(v ln 10).
  const double db_factor = 10.0 / (var * std::numbers::ln10);
  rows.push_back({"db_" + name, engine, db_rel_snl(var), "db_rel_snl",
                  std::abs(db_factor) * var_err, has_err});
  const double power = mean * mean + var;
  const double power_err =
      std::sqrt(4.0 * mean * mean * mean_err * mean_err + var_err * var_err);
  rows.push_back({"power_db_" + name, engine, db_rel_snl(power), "db_rel_snl",
                  10.0 / (power * std::numbers::ln10) * power_err, has_err});
}

void emit_threshold_rows(std::vector<ResultRow>& rows) {
  ThresholdResult best = optimal_gain();
  rows.push_back({"threshold_g_star", "covariance", best.g_star, "gain", 0, false});
  rows.push_back({"threshold_s_max", "covariance", best.s_max, "ratio", 0, false});
  rows.push_back({"threshold_squeezing_db", "covariance",
                  best.squeezing_db_required, "db", 0, false});
}

void run_covariance_engine(const Scenario& sc, std::vector<ResultRow>& rows) {
  ClusterSpec spec = ClusterSpec::per_source_db(sc.squeezing_db, sc.construction);
  GaussianState cluster = build_cluster(spec);
  for (int m = 0; m < 4; ++m) {
    if (sc.cluster_loss(m) < 1.0) {
      cluster = loss_channel(cluster, spec.modes[m], sc.cluster_loss(m));
    }
  }
  const Eigen::Vector4d means = input_means(sc);
  GaussianState input = tensor(coherent(labels::alpha, means(0), means(1)),
                               coherent(labels::beta, means(2), means(3)));
  GateRunResult result = run_gate(input, cluster, AveragePolicy{});
  GaussianState out = result.output_state;
  if (sc.output_loss(0) < 1.0) {
    out = loss_channel(out, labels::mu, sc.output_loss(0));
  }
  if (sc.output_loss(1) < 1.0) {
    out = loss_channel(out, labels::nu, sc.output_loss(1));
  }

  const char* names[4] = {"x_mu", "p_mu", "x_nu", "p_nu"};
  for (int q = 0; q < 4; ++q) {
    emit_quadrature_rows(rows, "covariance", names[q], out.mean()(q),
                         0.0, out.cov()(q, q), 0.0, false);
  }
  for (const WitnessResult& w : gain_sweep(out, sc.gains)) {
    const std::string tag = gain_tag(w.g);
    rows.push_back({"witness_term_mu_nu" + tag, "covariance", w.term_mu_nu,
                    "variance", 0, false});
    rows.push_back({"witness_term_nu_mu" + tag, "covariance", w.term_nu_mu,
                    "variance", 0, false});
    rows.push_back({"witness_sum" + tag, "covariance", w.sum, "variance", 0, false});
    rows.push_back({"witness_bound" + tag, "covariance", w.bound, "variance", 0, false});
    rows.push_back({"witness_normalized_sum" + tag, "covariance",
                    w.normalized_sum, "ratio", 0, false});
    rows.push_back({"witness_entangled" + tag, "covariance",
                    w.entangled ? 1.0 : 0.0, "verdict", 0, false});
  }
  if (sc.emit_threshold) {
    emit_threshold_rows(rows);
  }
}

void run_montecarlo_engine(const Scenario& sc, std::vector<ResultRow>& rows) {
  ShotConfig config;
  config.n_shots = sc.shots;
  config.seed = sc.seed;
  config.scenario.input_means = input_means(sc);
  for (int j = 0; j < 4; ++j) {
    config.scenario.source_s(j) = std::pow(10.0, sc.squeezing_db(j) / 10.0);
  }
  config.scenario.construction = sc.construction;
  config.scenario.cluster_efficiency = sc.cluster_loss;
  config.scenario.output_efficiency = sc.output_loss;
  config.scenario.gains = sc.gains;

  ShotStats stats = run_shots(config);
  const StatEstimate* quads[4] = {&stats.x_mu, &stats.p_mu, &stats.x_nu,
                                  &stats.p_nu};
  const char* names[4] = {"x_mu", "p_mu", "x_nu", "p_nu"};
  for (int q = 0; q < 4; ++q) {
    emit_quadrature_rows(rows, "montecarlo", names[q], quads[q]->mean,
                         quads[q]->std_error_of_mean(), quads[q]->variance,
                         quads[q]->std_error_of_variance, true);
  }
  for (const WitnessEstimate& w : stats.witnesses) {
    const std::string tag = gain_tag(w.g);
    rows.push_back({"witness_term_mu_nu" + tag, "montecarlo",
                    w.term_mu_nu.variance, "variance",
                    w.term_mu_nu.std_error_of_variance, true});
    rows.push_back({"witness_term_nu_mu" + tag, "montecarlo",
                    w.term_nu_mu.variance, "variance",
                    w.term_nu_mu.std_error_of_variance, true});
    rows.push_back({"witness_sum" + tag, "montecarlo", w.sum, "variance",
                    w.sum_std_error, true});
    rows.push_back({"witness_bound" + tag, "montecarlo", w.g, "variance", 0, false});
    rows.push_back({"witness_normalized_sum" + tag, "montecarlo", w.sum / w.g,
                    "ratio", w.sum_std_error / w.g, true});
    rows.push_back({"witness_entangled" + tag, "montecarlo",
                    w.entangled ? 1.0 : 0.0, "verdict", 0, false});
  }
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("invalid JSON: {}", e.what()));
  }
  if (!doc.is_object()) {
    throw ConfigError("top level: expected an object");
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1) {
    throw ConfigError("version: expected the integer 1");
  }
  Scenario sc;
  if (!doc.contains("name") || !doc["name"].is_string() ||
      doc["name"].get<std::string>().empty()) {
    throw ConfigError("name: expected a nonempty string");
  }
  sc.name = doc["name"].get<std::string>();

  if (!doc.contains("squeezing_db")) {
    throw ConfigError("squeezing_db: missing");
  }
  if (doc["squeezing_db"].is_array()) {
    if (doc["squeezing_db"].size() != 4) {
      throw ConfigError("squeezing_db: expected 4 per-source values");
    }
    for (int j = 0; j < 4; ++j) {
      sc.squeezing_db(j) = require_number(doc["squeezing_db"][j],
                                          fmt::format("squeezing_db[{}]", j));
    }
  } else {
    sc.squeezing_db.setConstant(
        require_number(doc["squeezing_db"], "squeezing_db"));
  }

  if (doc.contains("cluster_construction")) {
    const json& node = doc["cluster_construction"];
    if (!node.is_string()) {
      throw ConfigError("cluster_construction: expected a string");
    }
    const std::string c = node.get<std::string>();
    if (c == "experimental_nullifiers") {
      sc.construction = ClusterConstruction::ExperimentalNullifiers;
    } else if (c == "canonical_cz_chain") {
      sc.construction = ClusterConstruction::CanonicalCZChain;
    } else {
      throw ConfigError(
          fmt::format("cluster_construction: unknown construction '{}'", c));
    }
  }

  if (!doc.contains("inputs") || !doc["inputs"].is_object()) {
    throw ConfigError("inputs: expected an object with alpha and beta");
  }
  for (const auto& [key, value] : doc["inputs"].items()) {
    if (key != "alpha" && key != "beta") {
      throw ConfigError(fmt::format("inputs.{}: unknown input mode", key));
    }
    (void)value;
  }
  if (!doc["inputs"].contains("alpha") || !doc["inputs"].contains("beta")) {
    throw ConfigError("inputs: both alpha and beta are required");
  }
  sc.alpha = parse_input(doc["inputs"]["alpha"], "inputs.alpha");
  sc.beta = parse_input(doc["inputs"]["beta"], "inputs.beta");

  if (doc.contains("cluster_loss")) {
    const json& node = doc["cluster_loss"];
    if (node.is_object()) {
      const char* names[4] = {"C1", "C2", "C3", "C4"};
      for (const auto& [key, value] : node.items()) {
        bool known = false;
        for (int m = 0; m < 4; ++m) {
          if (key == names[m]) {
            sc.cluster_loss(m) =
                require_efficiency(value, "cluster_loss." + key);
            known = true;
          }
        }
        if (!known) {
          throw ConfigError(
              fmt::format("cluster_loss.{}: unknown cluster mode", key));
        }
      }
    } else {
      sc.cluster_loss.setConstant(require_efficiency(node, "cluster_loss"));
    }
  }
  if (doc.contains("output_loss")) {
    const json& node = doc["output_loss"];
    if (node.is_object()) {
      const char* names[2] = {"mu", "nu"};
      for (const auto& [key, value] : node.items()) {
        bool known = false;
        for (int m = 0; m < 2; ++m) {
          if (key == names[m]) {
            sc.output_loss(m) = require_efficiency(value, "output_loss." + key);
            known = true;
          }
        }
        if (!known) {
          throw ConfigError(
              fmt::format("output_loss.{}: unknown output mode", key));
        }
      }
    } else {
      sc.output_loss.setConstant(require_efficiency(node, "output_loss"));
    }
  }

  if (doc.contains("gains")) {
    if (!doc["gains"].is_array()) {
      throw ConfigError("gains: expected an array");
    }
    for (size_t i = 0; i < doc["gains"].size(); ++i) {
      const double g =
          require_number(doc["gains"][i], fmt::format("gains[{}]", i));
      if (!(g > 0.0)) {
        throw PhysicsError(fmt::format("gains[{}]: gain {} must be positive", i, g));
      }
      sc.gains.push_back(g);
    }
  }

  if (doc.contains("engine")) {
    if (!doc["engine"].is_string()) {
      throw ConfigError("engine: expected a string");
    }
    const std::string e = doc["engine"].get<std::string>();
    if (e == "covariance") {
      sc.engine = Engine::Covariance;
    } else if (e == "montecarlo") {
      sc.engine = Engine::MonteCarlo;
    } else if (e == "both") {
      sc.engine = Engine::Both;
    } else {
      throw ConfigError(fmt::format("engine: unknown engine '{}'", e));
    }
  }

  if (doc.contains("shots")) {
    if (!doc["shots"].is_number_integer()) {
      throw ConfigError("shots: expected an integer");
    }
    sc.shots = doc["shots"].get<std::int64_t>();
    if (sc.shots < 1) {
      throw PhysicsError("shots: must be at least 1");
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) {
      throw ConfigError("seed: expected an integer");
    }
    sc.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("emit_threshold")) {
    if (!doc["emit_threshold"].is_boolean()) {
      throw ConfigError("emit_threshold: expected a boolean");
    }
    sc.emit_threshold = doc["emit_threshold"].get<bool>();
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open scenario file '{}'", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

const std::map<std::string, std::string_view>& bundled_scenarios() {
  static const std::map<std::string, std::string_view> scenarios = {
#include "bundled_scenarios.inc"
  };
  return scenarios;
}

Scenario resolve_scenario(const std::string& ref) {
  if (std::ifstream probe(ref); probe) {
    return load_scenario_file(ref);
  }
  const auto& bundled = bundled_scenarios();
  auto it = bundled.find(ref);
  if (it == bundled.end()) {
    throw ConfigError(fmt::format(
        "'{}' is neither a readable file nor a bundled scenario", ref));
  }
  return parse_scenario(std::string(it->second));
}

std::vector<ResultRow> run_scenario(const Scenario& scenario) {
  std::vector<ResultRow> rows;
  if (scenario.engine == Engine::Covariance || scenario.engine == Engine::Both) {
    run_covariance_engine(scenario, rows);
  }
  if (scenario.engine == Engine::MonteCarlo || scenario.engine == Engine::Both) {
    run_montecarlo_engine(scenario, rows);
  }
  return rows;
}

EngineComparison compare_engines(const std::vector<ResultRow>& rows) {
  EngineComparison result;
  for (const ResultRow& mc : rows) {
    if (mc.engine != "montecarlo" || !mc.has_err) {
      continue;
    }
    for (const ResultRow& cov : rows) {
      if (cov.engine == "covariance" && cov.quantity == mc.quantity) {
        const double gap = std::abs(mc.value - cov.value);
        if (gap > 5.0 * mc.err) {
          result.ok = false;
          result.disagreements.push_back(fmt::format(
              "{}: montecarlo {} vs covariance {} differs by {:.3g} (> 5 x {:.3g})",
              mc.quantity, format_double(mc.value), format_double(cov.value),
              gap, mc.err));
        }
      }
    }
  }
  return result;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "quantity,engine,value,unit,err\n";
  for (const ResultRow& row : rows) {
    out += fmt::format("{},{},{},{},{}\n", row.quantity, row.engine,
                       format_double(row.value), row.unit,
                       row.has_err ? format_double(row.err) : "");
  }
  return out;
}

std::vector<ResultRow> parse_result_csv(const std::string& text) {
  std::vector<ResultRow> rows;
  std::stringstream stream(text);
  std::string line;
  bool first = true;
  while (std::getline(stream, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) {
      fields.push_back(field);
    }
    while (fields.size() < 5) {
      fields.emplace_back();
    }
    ResultRow row;
    row.quantity = fields[0];
    row.engine = fields[1];
    std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(),
                    row.value);
    row.unit = fields[3];
    row.has_err = !fields[4].empty();
    if (row.has_err) {
      std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(),
                      row.err);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string to_json(const Scenario& scenario,
                    const std::vector<ResultRow>& rows) {
  json doc;
  doc["version"] = 1;
  doc["scenario"] = scenario.name;
  doc["metadata"] = {
      {"seed", scenario.seed},
      {"shots", scenario.shots},
      {"generator", NormalSource::kGeneratorName},
      {"snl_variance", kVacuumVariance},
      {"engine_agreement_sigma", 5.0},
  };
  doc["rows"] = json::array();
  for (const ResultRow& row : rows) {
    json r = {{"quantity", row.quantity},
              {"engine", row.engine},
              {"value", row.value},
              {"unit", row.unit}};
    if (row.has_err) {
      r["err"] = row.err;
    }
    doc["rows"].push_back(r);
  }
  return doc.dump(2) + "\n";
}

}  // namespace cvsim
