#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cvsim/modes.hpp"

namespace cvsim {

/// Commutation form for n modes in interleaved ordering: block-diagonal
/// with 2x2 blocks ((0,1),(-1,0)).
Eigen::MatrixXd omega_matrix(int n_modes);

/// True when m * Omega * m^T = Omega entrywise within `tol`.
bool is_symplectic(const Eigen::MatrixXd& m, double tol = 1e-9);

/// Linear phase-space map plus displacement over an ordered list of modes.
///
/// Represents every optical element and gate of the model: squeezers,
/// rotations, beamsplitters and displacements. The matrix is validated as
/// symplectic at construction (tolerance 1e-9), so an instance can always be
/// applied safely.
class SymplecticTransform {
 public:
  SymplecticTransform(std::vector<ModeLabel> modes, Eigen::MatrixXd matrix,
                      Eigen::VectorXd displacement);

  static SymplecticTransform identity(std::vector<ModeLabel> modes);
  /// Pure displacement: x_j += dx_j, p_j += dp_j.
  static SymplecticTransform pure_displacement(std::vector<ModeLabel> modes,
                                               Eigen::VectorXd displacement);

  const std::vector<ModeLabel>& modes() const { return modes_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& displacement() const { return displacement_; }
  int num_modes() const { return static_cast<int>(modes_.size()); }

 private:
  std::vector<ModeLabel> modes_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd displacement_;
};

}  // namespace cvsim
