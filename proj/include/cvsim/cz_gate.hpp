#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <variant>

#include "cvsim/gaussian_state.hpp"
#include "cvsim/linear_form.hpp"
#include "cvsim/modes.hpp"

namespace cvsim {

/// Results of the two Bell measurements coupling the inputs to the cluster.
struct BellOutcomes {
  double t_alpha = 0.0;  // p_in - x_cl on the first pair
  double t_1 = 0.0;      // x_in - p_cl on the first pair
  double t_beta = 0.0;   // p_in - x_cl on the second pair
  double t_4 = 0.0;      // x_in - p_cl on the second pair
};

/// How run_gate produces Bell outcomes. The output state never depends on
/// the choice; outcomes are reported for bookkeeping and shot pipelines.
struct AveragePolicy {};
struct FixedPolicy {
  BellOutcomes outcomes;
};
struct SamplePolicy {
  std::uint64_t seed = 0;
};
using OutcomePolicy = std::variant<AveragePolicy, FixedPolicy, SamplePolicy>;

struct GateRunResult {
  GaussianState output_state;  // over modes {mu, nu}
  BellOutcomes outcomes;
  Eigen::Vector4d input_means;  // (<x_a>, <p_a>, <x_b>, <p_b>) as used
};

/// Two-mode controlled-phase map on (x_j, p_j, x_k, p_k):
/// x unchanged, p_j += x_k, p_k += x_j.
SymplecticTransform ideal_cz_transform(const ModeLabel& mode_j,
                                       const ModeLabel& mode_k);

/// ideal_cz_transform applied to a state containing both modes.
GaussianState ideal_cz(const GaussianState& state, const ModeLabel& mode_j,
                       const ModeLabel& mode_k);

/// The pair of commuting observables measured on one input/cluster pair:
/// (p_in - x_cl, x_in - p_cl).
std::pair<LinearForm, LinearForm> bell_forms(const ModeLabel& input_mode,
                                             const ModeLabel& cluster_mode);

/// Outcome-dependent corrections X(t_1) Z(t_alpha + t_4) on the first kept
/// mode and X(t_4) Z(t_beta + t_1) on the second; X shifts x, Z shifts p.
SymplecticTransform feedforward_transform(const BellOutcomes& outcomes,
                                          const ModeLabel& c2,
                                          const ModeLabel& c3);

/// Runs the full measurement-based gate: couple `input` (modes in order
/// alpha, beta) to `cluster` (four modes in chain order) through the two
/// Bell measurements, feed the outcomes forward, discard the measured modes
/// and relabel the kept pair to {mu, nu}.
///
/// The output state is computed in the Heisenberg picture: each output
/// quadrature is the exact linear combination "kept quadrature plus its
/// feedforward outcomes", e.g. x_mu = x_C2 + (x_alpha - p_C1). This realizes
/// the gate's closed-form input-output relation, which makes the result the
/// ensemble output over protocol runs and manifestly independent of the
/// outcome values (per-outcome Bayesian conditioning would not be; see
/// condition_on_forms for that primitive).
GateRunResult run_gate(const GaussianState& input, const GaussianState& cluster,
                       const OutcomePolicy& policy);

/// Closed-form predictor: mean' = B mean, cov' = B cov B^T + D S D^T, where
/// B is the controlled-phase block matrix, S the covariance of the four
/// nullifiers and D the fixed mixing of nullifiers into output noise
/// (-d1, d2 - d4, -d4, d3 - d1).
GaussianState predict_output(const GaussianState& input,
                             const Eigen::Matrix4d& nullifier_cov);

/// B: the ideal gate on (x_mu, p_mu, x_nu, p_nu).
Eigen::Matrix4d cz_block_matrix();

/// D: maps (delta_1..delta_4) onto the excess-noise vector.
Eigen::Matrix4d noise_mixing_matrix();

}  // namespace cvsim
