#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cvsim/cluster.hpp"
#include "cvsim/cz_gate.hpp"
#include "cvsim/gaussian_state.hpp"
#include "cvsim/rng.hpp"

namespace cvsim {

/// Sample mean/variance of one quadrature or witness combination.
struct StatEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double std_error_of_variance = 0.0;  // variance * sqrt(2/(n-1))
  std::int64_t n = 0;

  double std_error_of_mean() const;
};

struct WitnessEstimate {
  double g = 0.0;
  StatEstimate term_mu_nu;
  StatEstimate term_nu_mu;
  double sum = 0.0;
  double sum_std_error = 0.0;  // Gaussian fourth-moment error of the sum
  bool entangled = false;
};

/// Shot-level description of one gate run: coherent input means, per-source
/// squeezing ratios s = e^{-2r}, the cluster construction, and loss
/// efficiencies applied to the cluster modes after preparation and to the
/// outputs before analysis.
struct GateScenario {
  Eigen::Vector4d input_means = Eigen::Vector4d::Zero();
  Eigen::Vector4d source_s = Eigen::Vector4d::Ones();
  ClusterConstruction construction = ClusterConstruction::ExperimentalNullifiers;
  Eigen::Vector4d cluster_efficiency = Eigen::Vector4d::Ones();
  Eigen::Vector2d output_efficiency = Eigen::Vector2d::Ones();
  std::vector<double> gains;
};

struct ShotConfig {
  std::int64_t n_shots = 1;
  std::uint64_t seed = 0;
  GateScenario scenario;
  /// 0 = pick automatically. Results are identical for every thread count.
  int n_threads = 0;
};

/// Full trajectory of one shot, for diagnostics and identity checks.
struct ShotTrace {
  Eigen::Vector4d input;                        // x_a, p_a, x_b, p_b
  Eigen::Matrix<double, 8, 1> cluster;          // after cluster loss, pre feedforward
  BellOutcomes outcomes;
  Eigen::Vector4d output_pre_loss;              // x_mu, p_mu, x_nu, p_nu
  Eigen::Vector4d output;
};

struct ShotStats {
  StatEstimate x_mu, p_mu, x_nu, p_nu;
  std::vector<WitnessEstimate> witnesses;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::string generator;
};

/// One phase-space point distributed as `state`, via a symmetric
/// factorization of the covariance. Deterministic given the source state.
Eigen::VectorXd sample_initial(const GaussianState& state, NormalSource& rng);

/// The linear map taking the four squeezed sources to the cluster wires.
Eigen::Matrix<double, 8, 8> preparation_matrix(const GateScenario& scenario);

/// Simulates shot `index` of stream `seed`: draws source, input and loss
/// ancilla noises in a fixed documented order, propagates through the
/// preparation map, evaluates the Bell observables on the trajectory,
/// applies the outcome displacements and the output loss.
ShotTrace simulate_shot(const GateScenario& scenario,
                        const Eigen::Matrix<double, 8, 8>& prep,
                        std::uint64_t seed, std::int64_t index);

/// Runs config.n_shots independent shots and aggregates estimates with
/// pairwise summation in shot order, so results do not depend on the number
/// of worker threads.
ShotStats run_shots(const ShotConfig& config);

/// Per-shot combination g * p - x of two homodyne series (an amplitude
/// ratio g : 1, i.e. power ratio g^2 : 1).
std::vector<double> electronic_combination(const std::vector<double>& p_series,
                                           const std::vector<double>& x_series,
                                           double g);

}  // namespace cvsim
