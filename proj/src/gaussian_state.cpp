#include "cvsim/gaussian_state.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>

namespace cvsim {

namespace {

constexpr double kVacuumVariance = 0.25;
constexpr double kSymmetryTol = 1e-9;
// Below this variance a measured direction counts as deterministic and is
// only re-measurable with a consistent outcome.
constexpr double kDegenerateVariance = 1e-12;
constexpr double kOutcomeConsistencyTol = 1e-6;

}  // namespace

GaussianState::GaussianState(std::vector<ModeLabel> modes, Eigen::VectorXd mean,
                             Eigen::MatrixXd cov)
    : modes_(std::move(modes)), mean_(std::move(mean)), cov_(std::move(cov)) {
  const auto n = static_cast<Eigen::Index>(modes_.size());
  if (n == 0) {
    throw std::invalid_argument("state needs at least one mode");
  }
  std::set<ModeLabel> unique(modes_.begin(), modes_.end());
  if (unique.size() != modes_.size()) {
    throw std::invalid_argument("mode labels must be unique");
  }
  if (mean_.size() != 2 * n || cov_.rows() != 2 * n || cov_.cols() != 2 * n) {
    throw std::invalid_argument(
        fmt::format("state dimensions do not match {} modes", n));
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw std::invalid_argument("state entries must be finite");
  }
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() >
      kSymmetryTol * std::max(1.0, cov_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("covariance matrix is not symmetric");
  }
  cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();
}

bool GaussianState::contains(const ModeLabel& mode) const {
  return std::find(modes_.begin(), modes_.end(), mode) != modes_.end();
}

int GaussianState::mode_index(const ModeLabel& mode) const {
  auto it = std::find(modes_.begin(), modes_.end(), mode);
  if (it == modes_.end()) {
    throw std::invalid_argument(fmt::format("unknown mode '{}'", mode.name));
  }
  return static_cast<int>(it - modes_.begin());
}

int GaussianState::quad_index(const ModeLabel& mode, Quadrature q) const {
  return 2 * mode_index(mode) + (q == Quadrature::P ? 1 : 0);
}

GaussianState vacuum(const std::vector<ModeLabel>& modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  if (n == 0) {
    throw std::invalid_argument("vacuum needs at least one mode");
  }
  return GaussianState(modes, Eigen::VectorXd::Zero(2 * n),
                       kVacuumVariance *
                           Eigen::MatrixXd::Identity(2 * n, 2 * n));
}

GaussianState coherent(const ModeLabel& mode, double mean_x, double mean_p) {
  if (!std::isfinite(mean_x) || !std::isfinite(mean_p)) {
    throw std::invalid_argument("coherent amplitude must be finite");
  }
  Eigen::VectorXd mean(2);
  mean << mean_x, mean_p;
  return GaussianState({mode}, mean,
                       kVacuumVariance * Eigen::MatrixXd::Identity(2, 2));
}

GaussianState squeezed_vacuum(const ModeLabel& mode, double r) {
  if (!std::isfinite(r)) {
    throw std::invalid_argument("squeezing parameter must be finite");
  }
  Eigen::MatrixXd cov(2, 2);
  cov << kVacuumVariance * std::exp(2.0 * r), 0.0, 0.0,
      kVacuumVariance * std::exp(-2.0 * r);
  return GaussianState({mode}, Eigen::VectorXd::Zero(2), cov);
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  for (const auto& mode : b.modes()) {
    if (a.contains(mode)) {
      throw std::invalid_argument(
          fmt::format("mode '{}' present in both factors", mode.name));
    }
  }
  std::vector<ModeLabel> modes = a.modes();
  modes.insert(modes.end(), b.modes().begin(), b.modes().end());

  const Eigen::Index na = 2 * a.num_modes();
  const Eigen::Index nb = 2 * b.num_modes();
  Eigen::VectorXd mean(na + nb);
  mean << a.mean(), b.mean();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(na + nb, na + nb);
  cov.topLeftCorner(na, na) = a.cov();
  cov.bottomRightCorner(nb, nb) = b.cov();
  return GaussianState(std::move(modes), std::move(mean), std::move(cov));
}

GaussianState apply(const GaussianState& state, const SymplecticTransform& t) {
  const Eigen::Index dim = 2 * state.num_modes();
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(dim);

  std::vector<int> row(t.num_modes());
  for (int i = 0; i < t.num_modes(); ++i) {
    row[i] = 2 * state.mode_index(t.modes()[i]);
  }
  for (int i = 0; i < t.num_modes(); ++i) {
    for (int j = 0; j < t.num_modes(); ++j) {
      full.block<2, 2>(row[i], row[j]) = t.matrix().block<2, 2>(2 * i, 2 * j);
    }
    shift.segment<2>(row[i]) = t.displacement().segment<2>(2 * i);
  }

  return GaussianState(state.modes(), full * state.mean() + shift,
                       full * state.cov() * full.transpose());
}

GaussianState loss_channel(const GaussianState& state, const ModeLabel& mode,
                           double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument(
        fmt::format("loss efficiency {} outside [0, 1]", eta));
  }
  const int k = 2 * state.mode_index(mode);
  const double root = std::sqrt(eta);

  Eigen::VectorXd mean = state.mean();
  Eigen::MatrixXd cov = state.cov();
  mean.segment<2>(k) *= root;
  cov.row(k) *= root;
  cov.row(k + 1) *= root;
  cov.col(k) *= root;
  cov.col(k + 1) *= root;
  cov(k, k) += (1.0 - eta) * kVacuumVariance;
  cov(k + 1, k + 1) += (1.0 - eta) * kVacuumVariance;
  return GaussianState(state.modes(), std::move(mean), std::move(cov));
}

double variance_of(const GaussianState& state, const LinearForm& f) {
  if (f.empty()) {
    throw std::invalid_argument("form has no nonzero coefficient");
  }
  Eigen::VectorXd c = f.dense(state.modes());
  return c.dot(state.cov() * c);
}

double mean_of(const GaussianState& state, const LinearForm& f) {
  Eigen::VectorXd c = f.dense(state.modes());
  return c.dot(state.mean()) + f.offset();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> moments_of_forms(
    const GaussianState& state, const std::vector<LinearForm>& forms) {
  const auto k = static_cast<Eigen::Index>(forms.size());
  Eigen::MatrixXd rows(k, 2 * state.num_modes());
  Eigen::VectorXd offsets(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    rows.row(i) = forms[i].dense(state.modes());
    offsets(i) = forms[i].offset();
  }
  Eigen::VectorXd mean = rows * state.mean() + offsets;
  Eigen::MatrixXd cov = rows * state.cov() * rows.transpose();
  return {std::move(mean), ((cov + cov.transpose()) / 2.0).eval()};
}

GaussianState condition_on_forms(const GaussianState& state,
                                 const std::vector<LinearForm>& forms,
                                 const Eigen::VectorXd& outcomes) {
  const auto k = static_cast<Eigen::Index>(forms.size());
  if (k == 0) {
    return state;
  }
  if (outcomes.size() != k) {
    throw std::invalid_argument("one outcome required per form");
  }

  const Eigen::Index dim = 2 * state.num_modes();
  Eigen::MatrixXd rows(k, dim);
  Eigen::VectorXd offsets(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (forms[i].empty()) {
      throw std::invalid_argument("form has no nonzero coefficient");
    }
    rows.row(i) = forms[i].dense(state.modes());
    offsets(i) = forms[i].offset();
  }

  // Measured observables must be jointly measurable.
  Eigen::MatrixXd omega = omega_matrix(state.num_modes());
  Eigen::MatrixXd comm = rows * omega * rows.transpose();
  if (comm.cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("measured forms do not commute");
  }

  Eigen::MatrixXd s = rows * state.cov() * rows.transpose();
  s = ((s + s.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  Eigen::VectorXd innovation = outcomes - (rows * state.mean() + offsets);

  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double lambda = eig.eigenvalues()(i);
    const Eigen::VectorXd dir = eig.eigenvectors().col(i);
    if (lambda > kDegenerateVariance) {
      pinv += dir * dir.transpose() / lambda;
    } else if (std::abs(dir.dot(innovation)) > kOutcomeConsistencyTol) {
      throw std::invalid_argument(
          "conditioning on a deterministic form with an inconsistent outcome");
    }
  }

  Eigen::MatrixXd gain = state.cov() * rows.transpose() * pinv;
  Eigen::VectorXd mean = state.mean() + gain * innovation;
  Eigen::MatrixXd cov = state.cov() - gain * rows * state.cov();
  return GaussianState(state.modes(), std::move(mean),
                       ((cov + cov.transpose()) / 2.0).eval());
}

GaussianState partial_trace(const GaussianState& state,
                            const std::vector<ModeLabel>& drop) {
  std::set<int> dropped;
  for (const auto& mode : drop) {
    dropped.insert(state.mode_index(mode));
  }
  if (dropped.empty()) {
    return state;
  }
  if (dropped.size() == static_cast<size_t>(state.num_modes())) {
    throw std::invalid_argument("cannot trace out every mode");
  }

  std::vector<ModeLabel> kept;
  std::vector<Eigen::Index> rows;
  for (int m = 0; m < state.num_modes(); ++m) {
    if (!dropped.contains(m)) {
      kept.push_back(state.modes()[m]);
      rows.push_back(2 * m);
      rows.push_back(2 * m + 1);
    }
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd mean(n);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mean(i) = state.mean()(rows[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      cov(i, j) = state.cov()(rows[i], rows[j]);
    }
  }
  return GaussianState(std::move(kept), std::move(mean), std::move(cov));
}

bool check_uncertainty(const GaussianState& state, double tol) {
  const Eigen::Index dim = 2 * state.num_modes();
  Eigen::MatrixXcd herm =
      state.cov().cast<std::complex<double>>() +
      std::complex<double>(0.0, 0.25) *
          omega_matrix(state.num_modes()).cast<std::complex<double>>();
  herm = ((herm + herm.adjoint()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
  return eig.eigenvalues().minCoeff() >= -tol && dim == herm.rows();
}

double purity(const GaussianState& state) {
  return (4.0 * state.cov()).determinant();
}

}  // namespace cvsim
