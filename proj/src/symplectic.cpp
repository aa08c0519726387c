#include "cvsim/symplectic.hpp"

#include <fmt/format.h>

#include <set>
#include <stdexcept>

namespace cvsim {

Eigen::MatrixXd omega_matrix(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

bool is_symplectic(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) {
    return false;
  }
  Eigen::MatrixXd omega = omega_matrix(static_cast<int>(m.rows()) / 2);
  return ((m * omega * m.transpose() - omega).cwiseAbs().maxCoeff() <= tol);
}

SymplecticTransform::SymplecticTransform(std::vector<ModeLabel> modes,
                                         Eigen::MatrixXd matrix,
                                         Eigen::VectorXd displacement)
    : modes_(std::move(modes)),
      matrix_(std::move(matrix)),
      displacement_(std::move(displacement)) {
  const auto n = static_cast<Eigen::Index>(modes_.size());
  if (n == 0) {
    throw std::invalid_argument("transform needs at least one mode");
  }
  std::set<ModeLabel> unique(modes_.begin(), modes_.end());
  if (unique.size() != modes_.size()) {
    throw std::invalid_argument("transform mode labels must be unique");
  }
  if (matrix_.rows() != 2 * n || matrix_.cols() != 2 * n ||
      displacement_.size() != 2 * n) {
    throw std::invalid_argument(
        fmt::format("transform dimensions do not match {} modes", n));
  }
  if (!matrix_.allFinite() || !displacement_.allFinite()) {
    throw std::invalid_argument("transform entries must be finite");
  }
  if (!is_symplectic(matrix_)) {
    throw std::invalid_argument("matrix is not symplectic");
  }
}

SymplecticTransform SymplecticTransform::identity(std::vector<ModeLabel> modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  return SymplecticTransform(std::move(modes), Eigen::MatrixXd::Identity(2 * n, 2 * n),
                             Eigen::VectorXd::Zero(2 * n));
}

SymplecticTransform SymplecticTransform::pure_displacement(
    std::vector<ModeLabel> modes, Eigen::VectorXd displacement) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  return SymplecticTransform(std::move(modes), Eigen::MatrixXd::Identity(2 * n, 2 * n),
                             std::move(displacement));
}

}  // namespace cvsim
