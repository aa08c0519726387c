#include "cvsim/analysis.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvsim {

namespace {
constexpr double kVacuumVariance = 0.25;
}

double db_rel_snl(double variance) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument(
        fmt::format("variance {} must be positive", variance));
  }
  return 10.0 * std::log10(variance / kVacuumVariance);
}

double power_db_to_mean(double power_db) {
  const double ratio = std::pow(10.0, power_db / 10.0);
  if (!(ratio >= 1.0)) {
    throw std::invalid_argument(
        fmt::format("quadrature power {} dB is below the shot noise level",
                    power_db));
  }
  return std::sqrt((ratio - 1.0) * kVacuumVariance);
}

WitnessResult witness(const GaussianState& state, double g) {
  if (!(g > 0.0)) {
    throw std::invalid_argument(fmt::format("gain {} must be positive", g));
  }
  if (state.num_modes() != 2) {
    throw std::invalid_argument("witness needs a two-mode state");
  }
  const ModeLabel mu = state.modes()[0];
  const ModeLabel nu = state.modes()[1];

  WitnessResult result;
  result.g = g;
  result.term_mu_nu =
      variance_of(state, g * LinearForm::p(mu) - LinearForm::x(nu));
  result.term_nu_mu =
      variance_of(state, g * LinearForm::p(nu) - LinearForm::x(mu));
  result.sum = result.term_mu_nu + result.term_nu_mu;
  result.bound = g;
  result.entangled = result.sum < result.bound;
  result.normalized_sum = result.sum / g;
  return result;
}

std::vector<WitnessResult> gain_sweep(const GaussianState& state,
                                      const std::vector<double>& gains) {
  std::vector<WitnessResult> results;
  results.reserve(gains.size());
  for (double g : gains) {
    results.push_back(witness(state, g));
  }
  return results;
}

double squeezing_threshold(double g) {
  if (!(g > 0.0)) {
    throw std::invalid_argument(fmt::format("gain {} must be positive", g));
  }
  const double numerator = 2.0 * g - g * g - (1.0 - g) * (1.0 - g);
  if (numerator <= 0.0) {
    return 0.0;
  }
  const double half = g / std::numbers::sqrt2;
  const double denominator =
      (std::numbers::sqrt2 - half) * (std::numbers::sqrt2 - half) +
      2.5 * g * g;
  return numerator / denominator;
}

ThresholdResult optimal_gain() {
  // Coarse bracket of the maximum, then golden-section refinement.
  double best_g = 1.0;
  double best_s = 0.0;
  for (int i = 1; i < 2000; ++i) {
    const double g = i * 1e-3;
    const double s = squeezing_threshold(g);
    if (s > best_s) {
      best_s = s;
      best_g = g;
    }
  }
  double lo = best_g - 1e-3;
  double hi = best_g + 1e-3;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = squeezing_threshold(a);
  double fb = squeezing_threshold(b);
  while (hi - lo > 1e-9) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = squeezing_threshold(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = squeezing_threshold(a);
    }
  }
  const double g_star = (lo + hi) / 2.0;
  const double s_max = squeezing_threshold(g_star);
  return ThresholdResult{g_star, s_max, 10.0 * std::log10(s_max)};
}

double normalized_witness(const GaussianState& state, double g) {
  return witness(state, g).sum / g;
}

}  // namespace cvsim
