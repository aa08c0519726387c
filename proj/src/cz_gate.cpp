#include "cvsim/cz_gate.hpp"

#include <fmt/format.h>

#include <stdexcept>

#include "cvsim/rng.hpp"

namespace cvsim {

SymplecticTransform ideal_cz_transform(const ModeLabel& mode_j,
                                       const ModeLabel& mode_k) {
  if (mode_j == mode_k) {
    throw std::invalid_argument("controlled-phase needs two distinct modes");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  m(1, 2) = 1.0;  // p_j += x_k
  m(3, 0) = 1.0;  // p_k += x_j
  return SymplecticTransform({mode_j, mode_k}, m, Eigen::VectorXd::Zero(4));
}

GaussianState ideal_cz(const GaussianState& state, const ModeLabel& mode_j,
                       const ModeLabel& mode_k) {
  return apply(state, ideal_cz_transform(mode_j, mode_k));
}

std::pair<LinearForm, LinearForm> bell_forms(const ModeLabel& input_mode,
                                             const ModeLabel& cluster_mode) {
  if (input_mode == cluster_mode) {
    throw std::invalid_argument("bell measurement needs two distinct modes");
  }
  return {LinearForm::p(input_mode) - LinearForm::x(cluster_mode),
          LinearForm::x(input_mode) - LinearForm::p(cluster_mode)};
}

SymplecticTransform feedforward_transform(const BellOutcomes& outcomes,
                                          const ModeLabel& c2,
                                          const ModeLabel& c3) {
  Eigen::VectorXd d(4);
  d << outcomes.t_1, outcomes.t_alpha + outcomes.t_4, outcomes.t_4,
      outcomes.t_beta + outcomes.t_1;
  return SymplecticTransform::pure_displacement({c2, c3}, d);
}

GateRunResult run_gate(const GaussianState& input, const GaussianState& cluster,
                       const OutcomePolicy& policy) {
  if (input.num_modes() != 2) {
    throw std::invalid_argument("gate input must hold exactly two modes");
  }
  if (cluster.num_modes() != 4) {
    throw std::invalid_argument("cluster resource must hold exactly four modes");
  }
  const ModeLabel in_a = input.modes()[0];
  const ModeLabel in_b = input.modes()[1];
  const ModeLabel c1 = cluster.modes()[0];
  const ModeLabel c2 = cluster.modes()[1];
  const ModeLabel c3 = cluster.modes()[2];
  const ModeLabel c4 = cluster.modes()[3];

  GaussianState joint = tensor(input, cluster);

  auto [form_ta, form_t1] = bell_forms(in_a, c1);
  auto [form_tb, form_t4] = bell_forms(in_b, c4);
  const std::vector<LinearForm> bell = {form_ta, form_t1, form_tb, form_t4};

  BellOutcomes outcomes;
  if (std::holds_alternative<FixedPolicy>(policy)) {
    outcomes = std::get<FixedPolicy>(policy).outcomes;
  } else {
    auto [bell_mean, bell_cov] = moments_of_forms(joint, bell);
    Eigen::Vector4d t = bell_mean;
    if (std::holds_alternative<SamplePolicy>(policy)) {
      NormalSource rng(std::get<SamplePolicy>(policy).seed);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bell_cov);
      Eigen::Vector4d z;
      for (int i = 0; i < 4; ++i) {
        z(i) = rng.next();
      }
      t += eig.eigenvectors() *
           eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * z;
    }
    outcomes = {t(0), t(1), t(2), t(3)};
  }

  // Output quadratures in the Heisenberg picture: kept mode plus the
  // observables that feed it forward. Expanding the cluster nullifiers shows
  // these equal the controlled-phase map on the inputs plus nullifier noise.
  const std::vector<LinearForm> output_forms = {
      LinearForm::x(c2) + form_t1,
      LinearForm::p(c2) + form_ta + form_t4,
      LinearForm::x(c3) + form_t4,
      LinearForm::p(c3) + form_tb + form_t1,
  };
  auto [out_mean, out_cov] = moments_of_forms(joint, output_forms);

  Eigen::Vector4d input_means = input.mean();
  return GateRunResult{
      GaussianState({labels::mu, labels::nu}, out_mean, out_cov), outcomes,
      input_means};
}

Eigen::Matrix4d cz_block_matrix() {
  Eigen::Matrix4d b = Eigen::Matrix4d::Identity();
  b(1, 2) = 1.0;
  b(3, 0) = 1.0;
  return b;
}

Eigen::Matrix4d noise_mixing_matrix() {
  Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
  d(0, 0) = -1.0;
  d(1, 1) = 1.0;
  d(1, 3) = -1.0;
  d(2, 3) = -1.0;
  d(3, 2) = 1.0;
  d(3, 0) = -1.0;
  return d;
}

GaussianState predict_output(const GaussianState& input,
                             const Eigen::Matrix4d& nullifier_cov) {
  if (input.num_modes() != 2) {
    throw std::invalid_argument("gate input must hold exactly two modes");
  }
  Eigen::Matrix4d sym = (nullifier_cov + nullifier_cov.transpose()) / 2.0;
  if ((nullifier_cov - sym).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("nullifier covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(sym);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    throw std::invalid_argument(
        "nullifier covariance must be positive semidefinite");
  }

  const Eigen::Matrix4d b = cz_block_matrix();
  const Eigen::Matrix4d d = noise_mixing_matrix();
  Eigen::Vector4d mean = b * input.mean();
  Eigen::Matrix4d cov =
      b * input.cov() * b.transpose() + d * sym * d.transpose();
  return GaussianState({labels::mu, labels::nu}, mean, cov);
}

}  // namespace cvsim
