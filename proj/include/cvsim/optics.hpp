#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "cvsim/linear_form.hpp"
#include "cvsim/modes.hpp"
#include "cvsim/symplectic.hpp"

namespace cvsim {

struct Beamsplitter {
  ModeLabel mode_a;
  ModeLabel mode_b;
  double transmittance;  // strictly inside (0, 1)
};

struct PhaseRotation {
  ModeLabel mode;
  double theta;  // radians
};

struct Squeezer {
  ModeLabel mode;
  double r;  // x scales by e^r, p by e^-r
};

struct Displacement {
  ModeLabel mode;
  double dx;
  double dp;
};

using ElementSpec = std::variant<Beamsplitter, PhaseRotation, Squeezer, Displacement>;

/// Orthogonal symplectic mixing of two modes, identical on x and p:
///   x_a' = sqrt(T) x_a + sqrt(1-T) x_b
///   x_b' = sqrt(1-T) x_a - sqrt(T) x_b
SymplecticTransform beamsplitter_matrix(const ModeLabel& mode_a,
                                        const ModeLabel& mode_b,
                                        double transmittance);

/// x' = x cos(theta) - p sin(theta), p' = x sin(theta) + p cos(theta).
/// theta = pi/2 is the Fourier transform.
SymplecticTransform phase_rotation_matrix(const ModeLabel& mode, double theta);

SymplecticTransform squeezer_matrix(const ModeLabel& mode, double r);

SymplecticTransform displacement_matrix(const ModeLabel& mode, double dx,
                                        double dp);

/// Left-to-right product of the elements, lifted to the full mode list:
/// compose([A, B]) applies A first, then B.
SymplecticTransform compose(const std::vector<ElementSpec>& elements,
                            const std::vector<ModeLabel>& modes);

/// One nullifier requirement for the state-preparation map: evaluating
/// `nullifier_form` on the prepared modes must equal exactly the stated
/// combination of squeezed source quadratures e^{-r} p_j^(0), with zero
/// residual on every antisqueezed x_j^(0).
struct NullifierConstraint {
  LinearForm nullifier_form;      // over the prepared (cluster) modes
  Eigen::VectorXd source_coeffs;  // weight on each source's squeezed p^(0)
};

/// Synthesizes an orthogonal symplectic map M over `modes` such that the
/// prepared quadratures xi_out = M xi_src satisfy every constraint for all
/// squeezing levels. Source wire j feeds the mode at position j.
///
/// Works in the complex U(n) representation of the passive group, where the
/// constraints become linear: orthonormalize the source-side vectors, map
/// the basis onto the target side, and complete both bases deterministically
/// with canonical vectors. Throws std::invalid_argument when no passive map
/// exists (mismatched constraint Gram matrices) or dimensions disagree.
SymplecticTransform complete_passive_map(
    const std::vector<ModeLabel>& modes,
    const std::vector<NullifierConstraint>& constraints);

struct ConstraintResidual {
  double squeezed;      // max |pullback on p^(0) - source_coeffs|
  double antisqueezed;  // max |pullback on x^(0)|
};

struct NullifierMapReport {
  std::vector<ConstraintResidual> residuals;
  double max_residual() const;
};

/// Independent check of a candidate preparation map against the constraints:
/// pulls each nullifier form back through the map and reports the residual
/// on the squeezed and antisqueezed source columns.
NullifierMapReport verify_nullifier_map(
    const SymplecticTransform& map,
    const std::vector<NullifierConstraint>& constraints);

}  // namespace cvsim
