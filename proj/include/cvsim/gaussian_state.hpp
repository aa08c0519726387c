#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "cvsim/linear_form.hpp"
#include "cvsim/modes.hpp"
#include "cvsim/symplectic.hpp"

namespace cvsim {

/// Multimode Gaussian state in phase space: mean vector and covariance
/// matrix over labeled modes, interleaved ordering (x1, p1, x2, p2, ...).
///
/// Units follow the hbar = 1/2 convention, [x, p] = i/2, so every vacuum
/// quadrature has variance exactly 1/4 and all dB values reference 1/4.
///
/// The constructor enforces shape, finiteness and symmetry (1e-9). The
/// uncertainty relation is deliberately not a construction invariant:
/// condition_on_forms legitimately returns states whose measured directions
/// have collapsed to zero variance, which only become physical again after
/// the measured modes are discarded. Use check_uncertainty as the explicit
/// physicality guard.
///
/// States are immutable values; every operation returns a new state.
class GaussianState {
 public:
  GaussianState(std::vector<ModeLabel> modes, Eigen::VectorXd mean,
                Eigen::MatrixXd cov);

  const std::vector<ModeLabel>& modes() const { return modes_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  int num_modes() const { return static_cast<int>(modes_.size()); }

  bool contains(const ModeLabel& mode) const;
  /// Position of `mode` in the mode list. Throws if absent.
  int mode_index(const ModeLabel& mode) const;
  /// Row of the given quadrature in the interleaved ordering.
  int quad_index(const ModeLabel& mode, Quadrature q) const;

 private:
  std::vector<ModeLabel> modes_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// Vacuum on the given modes: zero mean, cov = (1/4) I.
GaussianState vacuum(const std::vector<ModeLabel>& modes);

/// Single-mode coherent state: displaced vacuum.
GaussianState coherent(const ModeLabel& mode, double mean_x, double mean_p);

/// Single-mode squeezed vacuum, cov = diag(e^{2r}/4, e^{-2r}/4);
/// r > 0 squeezes the p quadrature.
GaussianState squeezed_vacuum(const ModeLabel& mode, double r);

/// Tensor product; mode order is a then b. Throws on label collision.
GaussianState tensor(const GaussianState& a, const GaussianState& b);

/// Heisenberg-picture update: mean' = M mean + d, cov' = M cov M^T.
/// The transform may address any subset of the state's modes; unaddressed
/// modes are untouched.
GaussianState apply(const GaussianState& state, const SymplecticTransform& t);

/// Pure attenuation of one mode with efficiency eta in [0, 1]: the mode's
/// mean scales by sqrt(eta), its covariance block maps to
/// eta * block + (1 - eta)/4 * I, and cross covariances scale by sqrt(eta).
GaussianState loss_channel(const GaussianState& state, const ModeLabel& mode,
                           double eta);

/// Variance of the observable defined by `f` (offset and mean excluded).
double variance_of(const GaussianState& state, const LinearForm& f);

/// Expectation of `f` including its offset.
double mean_of(const GaussianState& state, const LinearForm& f);

/// Joint first and second moments of a list of forms: means include the
/// form offsets, covariance is F cov F^T.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> moments_of_forms(
    const GaussianState& state, const std::vector<LinearForm>& forms);

/// Gaussian conditional update after measuring the given commuting forms
/// with the given outcomes. All modes are retained; fully measured modes
/// collapse in place and are discarded by the caller via partial_trace.
///
/// Outcomes are values of the full forms (offset included). Measured
/// directions that are already deterministic (variance <= 1e-12) are
/// accepted only when the outcome agrees with the current mean, which makes
/// conditioning idempotent; a conflicting outcome throws.
GaussianState condition_on_forms(const GaussianState& state,
                                 const std::vector<LinearForm>& forms,
                                 const Eigen::VectorXd& outcomes);

/// Discard the listed modes (delete their rows/columns).
GaussianState partial_trace(const GaussianState& state,
                            const std::vector<ModeLabel>& drop);

/// True iff cov + (i/4) Omega >= -tol, i.e. the uncertainty relation holds.
bool check_uncertainty(const GaussianState& state, double tol = 1e-9);

/// det(4 cov); equals 1 for pure states in these units.
double purity(const GaussianState& state);

}  // namespace cvsim
