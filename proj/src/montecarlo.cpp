#include "cvsim/montecarlo.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>
#include <thread>

namespace cvsim {

namespace {

// Fixed draw order per shot: 8 source quadratures, 4 input quadratures,
// 8 cluster-loss ancillas, 4 output-loss ancillas. All 24 normals are drawn
// every shot so the stream layout never depends on the configuration.
constexpr int kDrawsPerShot = 24;

double attenuate(double value, double eta, double ancilla) {
  return std::sqrt(eta) * value + std::sqrt(1.0 - eta) * 0.5 * ancilla;
}

}  // namespace

double StatEstimate::std_error_of_mean() const {
  return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0;
}

Eigen::VectorXd sample_initial(const GaussianState& state, NormalSource& rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(state.cov());
  Eigen::VectorXd z(state.cov().rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z(i) = rng.next();
  }
  return state.mean() + eig.eigenvectors() *
                            eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                            z;
}

Eigen::Matrix<double, 8, 8> preparation_matrix(const GateScenario& scenario) {
  ClusterSpec spec;
  spec.construction = scenario.construction;
  // The preparation map is squeezing-independent; any spec value works here.
  return preparation_map(spec).matrix();
}

ShotTrace simulate_shot(const GateScenario& scenario,
                        const Eigen::Matrix<double, 8, 8>& prep,
                        std::uint64_t seed, std::int64_t index) {
  NormalSource rng(shot_seed(seed, index));
  double z[kDrawsPerShot];
  for (double& v : z) {
    v = rng.next();
  }

  Eigen::Matrix<double, 8, 1> sources;
  for (int j = 0; j < 4; ++j) {
    const double root_s = std::sqrt(scenario.source_s(j));
    sources(2 * j) = 0.5 * z[2 * j] / root_s;       // antisqueezed x
    sources(2 * j + 1) = 0.5 * z[2 * j + 1] * root_s;  // squeezed p
  }

  ShotTrace trace;
  trace.cluster = prep * sources;
  for (int m = 0; m < 4; ++m) {
    const double eta = scenario.cluster_efficiency(m);
    trace.cluster(2 * m) = attenuate(trace.cluster(2 * m), eta, z[12 + 2 * m]);
    trace.cluster(2 * m + 1) =
        attenuate(trace.cluster(2 * m + 1), eta, z[12 + 2 * m + 1]);
  }

  for (int i = 0; i < 4; ++i) {
    trace.input(i) = scenario.input_means(i) + 0.5 * z[8 + i];
  }

  const double x_a = trace.input(0), p_a = trace.input(1);
  const double x_b = trace.input(2), p_b = trace.input(3);
  trace.outcomes.t_alpha = p_a - trace.cluster(0);  // p_alpha - x_C1
  trace.outcomes.t_1 = x_a - trace.cluster(1);      // x_alpha - p_C1
  trace.outcomes.t_beta = p_b - trace.cluster(6);   // p_beta - x_C4
  trace.outcomes.t_4 = x_b - trace.cluster(7);      // x_beta - p_C4

  trace.output_pre_loss(0) = trace.cluster(2) + trace.outcomes.t_1;
  trace.output_pre_loss(1) =
      trace.cluster(3) + trace.outcomes.t_alpha + trace.outcomes.t_4;
  trace.output_pre_loss(2) = trace.cluster(4) + trace.outcomes.t_4;
  trace.output_pre_loss(3) =
      trace.cluster(5) + trace.outcomes.t_beta + trace.outcomes.t_1;

  for (int m = 0; m < 2; ++m) {
    const double eta = scenario.output_efficiency(m);
    trace.output(2 * m) =
        attenuate(trace.output_pre_loss(2 * m), eta, z[20 + 2 * m]);
    trace.output(2 * m + 1) =
        attenuate(trace.output_pre_loss(2 * m + 1), eta, z[20 + 2 * m + 1]);
  }
  return trace;
}

std::vector<double> electronic_combination(const std::vector<double>& p_series,
                                           const std::vector<double>& x_series,
                                           double g) {
  if (p_series.size() != x_series.size()) {
    throw std::invalid_argument("series lengths differ");
  }
  std::vector<double> combined(p_series.size());
  for (size_t i = 0; i < p_series.size(); ++i) {
    combined[i] = g * p_series[i] - x_series[i];
  }
  return combined;
}

ShotStats run_shots(const ShotConfig& config) {
  if (config.n_shots < 1) {
    throw std::invalid_argument("n_shots must be at least 1");
  }
  for (int j = 0; j < 4; ++j) {
    if (!(config.scenario.source_s(j) > 0.0)) {
      throw std::invalid_argument("source squeezing ratio must be positive");
    }
    if (!(config.scenario.cluster_efficiency(j) >= 0.0 &&
          config.scenario.cluster_efficiency(j) <= 1.0)) {
      throw std::invalid_argument("cluster efficiency outside [0, 1]");
    }
  }
  for (int m = 0; m < 2; ++m) {
    if (!(config.scenario.output_efficiency(m) >= 0.0 &&
          config.scenario.output_efficiency(m) <= 1.0)) {
      throw std::invalid_argument("output efficiency outside [0, 1]");
    }
  }

  const auto n = static_cast<size_t>(config.n_shots);
  const Eigen::Matrix<double, 8, 8> prep = preparation_matrix(config.scenario);

  std::vector<double> series[4];
  for (auto& s : series) {
    s.resize(n);
  }

  auto fill_range = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      ShotTrace trace = simulate_shot(config.scenario, prep, config.seed,
                                      static_cast<std::int64_t>(i));
      for (int q = 0; q < 4; ++q) {
        series[q][i] = trace.output(q);
      }
    }
  };

  int threads = config.n_threads;
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) {
      threads = 1;
    }
  }
  if (threads > 1 && n >= 10000) {
    std::vector<std::thread> pool;
    const size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const size_t begin = t * chunk;
      const size_t end = std::min(n, begin + chunk);
      if (begin < end) {
        pool.emplace_back(fill_range, begin, end);
      }
    }
    for (auto& worker : pool) {
      worker.join();
    }
  } else {
    fill_range(0, n);
  }

  ShotStats stats;
  stats.n = config.n_shots;
  stats.seed = config.seed;
  stats.generator = NormalSource::kGeneratorName;

  const double var_err_factor =
      config.n_shots > 1
          ? std::sqrt(2.0 / static_cast<double>(config.n_shots - 1))
          : 0.0;
  auto estimate = [&](std::span<const double> values) {
    MeanVariance mv = mean_and_variance(values);
    return StatEstimate{mv.mean, mv.variance, mv.variance * var_err_factor,
                        config.n_shots};
  };
  stats.x_mu = estimate(series[0]);
  stats.p_mu = estimate(series[1]);
  stats.x_nu = estimate(series[2]);
  stats.p_nu = estimate(series[3]);

  for (double g : config.scenario.gains) {
    std::vector<double> a = electronic_combination(series[1], series[2], g);
    std::vector<double> b = electronic_combination(series[3], series[0], g);
    WitnessEstimate w;
    w.g = g;
    w.term_mu_nu = estimate(a);
    w.term_nu_mu = estimate(b);
    w.sum = w.term_mu_nu.variance + w.term_nu_mu.variance;
    const double cross = config.n_shots > 1 ? sample_covariance(a, b) : 0.0;
    // Var(sum of two sample variances) for jointly Gaussian series:
    // (2/(n-1)) (Va^2 + Vb^2 + 2 Cab^2).
    w.sum_std_error =
        var_err_factor *
        std::sqrt(w.term_mu_nu.variance * w.term_mu_nu.variance +
                  w.term_nu_mu.variance * w.term_nu_mu.variance +
                  2.0 * cross * cross);
    w.entangled = w.sum < g;
    stats.witnesses.push_back(w);
  }
  return stats;
}

}  // namespace cvsim
