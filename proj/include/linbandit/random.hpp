#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace linbandit {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Bijective on 64-bit words, so distinct inputs never
// collide.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent named streams hanging off one episode seed.
enum class Stream : std::uint64_t {
  kTheta = 1,
  kActionSets = 2,
  kNoise = 3,
  kPolicy = 4,
  kDiagnostic = 5,
};

inline Rng make_stream(std::uint64_t seed, Stream stream) {
  const std::uint64_t mixed =
      splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
  return Rng(mixed);
}

/// Seed of replication `index` (1-based) under `base_seed`: base ^ index.
/// Distinct for every index below 2^64, in particular for R <= 2^32.
inline std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index) {
  return base_seed ^ index;
}

inline Eigen::VectorXd uniform_sphere(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  while (norm < 1e-12) {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
    norm = v.norm();
  }
  return v / norm;
}

inline Eigen::VectorXd uniform_ball(Eigen::Index dim, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(dim));
  return radius * uniform_sphere(dim, rng);
}

}  // namespace linbandit
