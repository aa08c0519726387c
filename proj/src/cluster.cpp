#include "cvsim/cluster.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvsim/cz_gate.hpp"

namespace cvsim {

namespace {

void validate(const ClusterSpec& spec) {
  if (spec.modes.size() != 4) {
    throw std::invalid_argument("cluster spec needs exactly four modes");
  }
  if (!spec.squeezing_r.allFinite()) {
    throw std::invalid_argument("squeezing must be finite");
  }
}

double r_from_db(double squeezing_db) {
  // s = e^{-2r} = 10^{db/10}
  return -squeezing_db * std::numbers::ln10 / 20.0;
}

}  // namespace

ClusterSpec ClusterSpec::uniform_db(double squeezing_db,
                                    ClusterConstruction construction) {
  ClusterSpec spec;
  spec.squeezing_r.setConstant(r_from_db(squeezing_db));
  spec.construction = construction;
  return spec;
}

ClusterSpec ClusterSpec::uniform_s(double s, ClusterConstruction construction) {
  if (!(s > 0.0)) {
    throw std::invalid_argument("squeezing ratio s must be positive");
  }
  ClusterSpec spec;
  spec.squeezing_r.setConstant(-0.5 * std::log(s));
  spec.construction = construction;
  return spec;
}

ClusterSpec ClusterSpec::per_source_db(const Eigen::Vector4d& squeezing_db,
                                       ClusterConstruction construction) {
  ClusterSpec spec;
  for (int j = 0; j < 4; ++j) {
    spec.squeezing_r(j) = r_from_db(squeezing_db(j));
  }
  spec.construction = construction;
  return spec;
}

Eigen::Vector4d ClusterSpec::s() const {
  return (-2.0 * squeezing_r).array().exp();
}

std::vector<std::pair<ModeLabel, ModeLabel>> ClusterSpec::edges() const {
  return {{modes[0], modes[1]}, {modes[1], modes[2]}, {modes[2], modes[3]}};
}

std::vector<LinearForm> nullifier_forms(const ClusterSpec& spec) {
  validate(spec);
  const auto& m = spec.modes;
  return {
      LinearForm::p(m[0]) - LinearForm::x(m[1]),
      LinearForm::p(m[1]) - LinearForm::x(m[0]) - LinearForm::x(m[2]),
      LinearForm::p(m[2]) - LinearForm::x(m[1]) - LinearForm::x(m[3]),
      LinearForm::p(m[3]) - LinearForm::x(m[2]),
  };
}

Eigen::Matrix4d nullifier_source_rows(const ClusterSpec& spec) {
  if (spec.construction == ClusterConstruction::CanonicalCZChain) {
    return Eigen::Matrix4d::Identity();
  }
  const double rt2 = std::numbers::sqrt2;
  const double c = 5.0 / std::sqrt(10.0);
  Eigen::Matrix4d rows = Eigen::Matrix4d::Zero();
  rows(0, 0) = rt2;
  rows(1, 2) = -c;
  rows(1, 3) = -1.0 / rt2;
  rows(2, 0) = 1.0 / rt2;
  rows(2, 1) = -c;
  rows(3, 3) = -rt2;
  return rows;
}

std::vector<NullifierConstraint> experimental_nullifier_constraints(
    const ClusterSpec& spec) {
  validate(spec);
  Eigen::Matrix4d rows = nullifier_source_rows(
      ClusterSpec{spec.modes, spec.squeezing_r,
                  ClusterConstruction::ExperimentalNullifiers});
  std::vector<LinearForm> forms = nullifier_forms(spec);
  std::vector<NullifierConstraint> constraints;
  for (int j = 0; j < 4; ++j) {
    constraints.push_back({forms[j], rows.row(j).transpose()});
  }
  return constraints;
}

Eigen::Matrix4d nullifier_covariance_from_sources(const Eigen::Matrix4d& rows,
                                                  const Eigen::Vector4d& s) {
  return rows * (s / 4.0).asDiagonal() * rows.transpose();
}

SymplecticTransform preparation_map(const ClusterSpec& spec) {
  validate(spec);
  if (spec.construction == ClusterConstruction::ExperimentalNullifiers) {
    return complete_passive_map(spec.modes,
                                experimental_nullifier_constraints(spec));
  }
  const auto n = static_cast<Eigen::Index>(spec.modes.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (const auto& [a, b] : spec.edges()) {
    SymplecticTransform cz = ideal_cz_transform(a, b);
    Eigen::MatrixXd full = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    int ia = 0;
    int ib = 0;
    for (int i = 0; i < 4; ++i) {
      if (spec.modes[i] == a) ia = 2 * i;
      if (spec.modes[i] == b) ib = 2 * i;
    }
    full.block<2, 2>(ia, ia) = cz.matrix().block<2, 2>(0, 0);
    full.block<2, 2>(ia, ib) = cz.matrix().block<2, 2>(0, 2);
    full.block<2, 2>(ib, ia) = cz.matrix().block<2, 2>(2, 0);
    full.block<2, 2>(ib, ib) = cz.matrix().block<2, 2>(2, 2);
    m = (full * m).eval();
  }
  return SymplecticTransform(spec.modes, std::move(m),
                             Eigen::VectorXd::Zero(2 * n));
}

GaussianState build_cluster(const ClusterSpec& spec) {
  validate(spec);
  GaussianState sources = squeezed_vacuum(spec.modes[0], spec.squeezing_r(0));
  for (int j = 1; j < 4; ++j) {
    sources = tensor(sources, squeezed_vacuum(spec.modes[j], spec.squeezing_r(j)));
  }
  return apply(sources, preparation_map(spec));
}

NullifierDiagnostics diagnose(const GaussianState& state,
                              const ClusterSpec& spec) {
  validate(spec);
  auto [mean, cov] = moments_of_forms(state, nullifier_forms(spec));
  (void)mean;
  NullifierDiagnostics diag;
  diag.cross_cov = cov;
  diag.variance = cov.diagonal();
  diag.expected =
      nullifier_covariance_from_sources(nullifier_source_rows(spec), spec.s())
          .diagonal();
  diag.excess = diag.variance - diag.expected;
  return diag;
}

}  // namespace cvsim
