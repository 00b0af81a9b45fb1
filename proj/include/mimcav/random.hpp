#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mimcav {

/// Seeded Gaussian noise for synthetic data. Independent streams are
/// derived per task index so ensembles do not depend on scheduling.
class NoiseSource {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+splitmix64-stream+std::normal_distribution";

  explicit NoiseSource(std::uint64_t seed, std::uint64_t stream = 0) : engine_(mix(seed, stream)) {}

  double normal(double sigma) { return sigma * dist_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace mimcav
