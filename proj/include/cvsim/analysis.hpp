#pragma once

#include <vector>

#include "cvsim/gaussian_state.hpp"

namespace cvsim {

/// Variance relative to the shot noise level in dB: 10 log10(v / (1/4)).
double db_rel_snl(double variance);

/// Coherent amplitude whose quadrature power sits `power_db` above the SNL,
/// under power = mean^2 + vacuum variance. Throws below the SNL.
double power_db_to_mean(double power_db);

/// Evaluation of the two-mode inseparability criterion
///   Var(g p_mu - x_nu) + Var(g p_nu - x_mu) < g
/// at one gain. `normalized_sum` = sum / g so entanglement reads < 1.
struct WitnessResult {
  double g;
  double term_mu_nu;
  double term_nu_mu;
  double sum;
  double bound;  // = g
  bool entangled;
  double normalized_sum;
};

/// Witness over a two-mode state (first mode mu, second nu). g must be > 0.
WitnessResult witness(const GaussianState& state, double g);

std::vector<WitnessResult> gain_sweep(const GaussianState& state,
                                      const std::vector<double>& gains);

/// Largest resource squeezing ratio s = e^{-2r} for which the gate output
/// on vacuum inputs is still witnessed entangled at gain g:
///   s_max(g) = [2g - g^2 - (1-g)^2] / [(sqrt(2) - g/sqrt(2))^2 + (5/2) g^2],
/// clamped to 0 where no squeezing level suffices.
double squeezing_threshold(double g);

struct ThresholdResult {
  double g_star;
  double s_max;
  double squeezing_db_required;  // 10 log10(s_max)
};

/// Gain maximizing the squeezing threshold, found by scalar maximization
/// over (0, 2) to 1e-6 in g.
ThresholdResult optimal_gain();

/// witness(state, g).sum / g; entanglement iff < 1.
double normalized_witness(const GaussianState& state, double g);

}  // namespace cvsim
