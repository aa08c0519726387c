#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cvsim/gaussian_state.hpp"
#include "cvsim/linear_form.hpp"
#include "cvsim/modes.hpp"
#include "cvsim/optics.hpp"

namespace cvsim {

enum class ClusterConstruction {
  /// Passive network completed from the measured nullifier decomposition of
  /// the four-source, three-beamsplitter preparation.
  ExperimentalNullifiers,
  /// Ideal controlled-phase gates along the chain edges, giving
  /// delta_j = e^{-r} p_j^(0) exactly.
  CanonicalCZChain,
};

/// Four-mode linear-chain cluster resource: modes in chain order, per-source
/// squeezing r_j (nats, r > 0 squeezes p), and the construction to use.
struct ClusterSpec {
  std::vector<ModeLabel> modes = labels::cluster_chain();
  Eigen::Vector4d squeezing_r = Eigen::Vector4d::Zero();
  ClusterConstruction construction = ClusterConstruction::ExperimentalNullifiers;

  /// Equal squeezing stated as a variance ratio in dB (negative = squeezed),
  /// s = e^{-2r} = 10^{db/10}.
  static ClusterSpec uniform_db(double squeezing_db,
                                ClusterConstruction construction =
                                    ClusterConstruction::ExperimentalNullifiers);
  /// Equal squeezing stated as s = e^{-2r} directly.
  static ClusterSpec uniform_s(double s,
                               ClusterConstruction construction =
                                   ClusterConstruction::ExperimentalNullifiers);
  static ClusterSpec per_source_db(const Eigen::Vector4d& squeezing_db,
                                   ClusterConstruction construction =
                                       ClusterConstruction::ExperimentalNullifiers);

  /// s_j = e^{-2 r_j} per source.
  Eigen::Vector4d s() const;
  /// Chain edges C1-C2, C2-C3, C3-C4.
  std::vector<std::pair<ModeLabel, ModeLabel>> edges() const;
};

/// delta_j = p_Cj - sum_{k in N_j} x_Ck for the linear chain,
/// N_1 = {2}, N_2 = {1,3}, N_3 = {2,4}, N_4 = {3}.
std::vector<LinearForm> nullifier_forms(const ClusterSpec& spec);

/// The nullifier decomposition of the experimental preparation in terms of
/// the squeezed source quadratures e^{-r} p_j^(0):
///   delta_1 = sqrt(2) p_1,  delta_2 = -(5/sqrt(10)) p_3 - (1/sqrt(2)) p_4,
///   delta_3 = (1/sqrt(2)) p_1 - (5/sqrt(10)) p_2,  delta_4 = -sqrt(2) p_4.
std::vector<NullifierConstraint> experimental_nullifier_constraints(
    const ClusterSpec& spec);

/// Source rows of the chosen construction (identity for CanonicalCZChain).
Eigen::Matrix4d nullifier_source_rows(const ClusterSpec& spec);

/// Nullifier covariance implied by source rows C and per-source s:
/// Sigma[i][j] = sum_k C(i,k) C(j,k) s_k / 4.
Eigen::Matrix4d nullifier_covariance_from_sources(const Eigen::Matrix4d& rows,
                                                  const Eigen::Vector4d& s);

/// The symplectic preparation map of the chosen construction, acting on
/// four p-squeezed sources carried on the cluster wires.
SymplecticTransform preparation_map(const ClusterSpec& spec);

/// Build the resource state: four p-squeezed vacua through the preparation
/// map of the chosen construction.
GaussianState build_cluster(const ClusterSpec& spec);

struct NullifierDiagnostics {
  Eigen::Vector4d variance;  // measured on the state
  Eigen::Vector4d expected;  // from the construction's source rows
  Eigen::Vector4d excess;    // measured - expected
  Eigen::Matrix4d cross_cov; // full nullifier covariance of the state
};

/// Measured vs. expected nullifier statistics of a candidate resource state.
NullifierDiagnostics diagnose(const GaussianState& state,
                              const ClusterSpec& spec);

}  // namespace cvsim
