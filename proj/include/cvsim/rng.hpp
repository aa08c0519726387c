#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace cvsim {

/// SplitMix64 finalizer; used to derive independent per-shot seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for shot `index` of stream `seed`. Every consumer of per-shot
/// randomness derives its generator exclusively from this value, which makes
/// results independent of execution order and thread count.
std::uint64_t shot_seed(std::uint64_t seed, std::int64_t index);

/// Standard-normal source: mt19937_64 raw output mapped through an explicit
/// Box-Muller transform, so streams are reproducible across standard-library
/// implementations (std::normal_distribution is not).
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double next();

  static constexpr const char* kGeneratorName = "mt19937_64+box-muller";

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Pairwise (cascade) summation; deterministic for a fixed element order and
/// accurate to O(log n) rounding steps.
double pairwise_sum(std::span<const double> values);

struct MeanVariance {
  double mean;
  double variance;  // unbiased (n-1 denominator); 0 when n < 2
};

/// Two-pass mean and unbiased sample variance with pairwise accumulation.
MeanVariance mean_and_variance(std::span<const double> values);

/// Two-pass unbiased sample covariance of two equally long series.
double sample_covariance(std::span<const double> a, std::span<const double> b);

}  // namespace cvsim
