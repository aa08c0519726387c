#include "cvsim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cvsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t shot_seed(std::uint64_t seed, std::int64_t index) {
  return splitmix64(seed + 0x9E3779B97F4A7C15ULL *
                               (static_cast<std::uint64_t>(index) + 1));
}

double NormalSource::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // 53-bit uniforms in (0, 1]; u1 > 0 keeps the log finite.
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

double pairwise_sum(std::span<const double> values) {
  const size_t n = values.size();
  if (n == 0) {
    return 0.0;
  }
  if (n <= 8) {
    double total = 0.0;
    for (double v : values) {
      total += v;
    }
    return total;
  }
  const size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanVariance mean_and_variance(std::span<const double> values) {
  const size_t n = values.size();
  if (n == 0) {
    throw std::invalid_argument("empty sample");
  }
  const double mean = pairwise_sum(values) / static_cast<double>(n);
  if (n < 2) {
    return {mean, 0.0};
  }
  std::vector<double> centered(n);
  for (size_t i = 0; i < n; ++i) {
    const double d = values[i] - mean;
    centered[i] = d * d;
  }
  const double variance = pairwise_sum(centered) / static_cast<double>(n - 1);
  return {mean, variance};
}

double sample_covariance(std::span<const double> a, std::span<const double> b) {
  const size_t n = a.size();
  if (n != b.size() || n < 2) {
    throw std::invalid_argument("covariance needs two equal series, n >= 2");
  }
  const double mean_a = pairwise_sum(a) / static_cast<double>(n);
  const double mean_b = pairwise_sum(b) / static_cast<double>(n);
  std::vector<double> cross(n);
  for (size_t i = 0; i < n; ++i) {
    cross[i] = (a[i] - mean_a) * (b[i] - mean_b);
  }
  return pairwise_sum(cross) / static_cast<double>(n - 1);
}

}  // namespace cvsim
