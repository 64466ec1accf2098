#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "srgmm/types.hpp"

namespace srgmm {

// Deterministic counter-based randomness. A SeedTree names a stream by the
// root seed plus a path of labeled derivation steps; values are pure
// functions of (key, counter), so any evaluation order — or parallel
// generation — produces identical output. Distinct paths give streams that
// are independent for all practical purposes.
class SeedTree {
 public:
  static SeedTree root(std::uint64_t seed);
  SeedTree child(std::string_view label) const;
  SeedTree child(std::string_view label, std::uint64_t index) const;

  std::uint64_t bits(std::uint64_t counter) const;
  double uniform(std::uint64_t counter) const;       // [0, 1)
  double uniform_open(std::uint64_t counter) const;  // (0, 1)
  // Standard normal, random-access by index. Indices 2p and 2p+1 share one
  // Box-Muller draw (cos/sin halves), which keeps them independent.
  double normal(std::uint64_t counter) const;

  std::uint64_t root_seed() const { return root_seed_; }
  std::uint64_t key() const { return key_; }
  const std::string& path() const { return path_; }

 private:
  SeedTree(std::uint64_t root_seed, std::uint64_t key, std::string path);
  std::uint64_t root_seed_ = 0;
  std::uint64_t key_ = 0;
  std::string path_;
};

// `count` draws from N(mean, cov) as rows. `sigma` is the model-level cap:
// cov must satisfy ||cov|| <= sigma^2 + 1e-9. count == 0 gives a 0 x d matrix.
Matrix sample_gaussian(const Vector& mean, const CovarianceSpec& cov,
                       double sigma, std::int64_t count, const SeedTree& stream);

// Uniform direction on the unit sphere (normalized Gaussian vector). d == 1
// gives ±1.
Vector sample_unit_direction(Index d, const SeedTree& stream);

// Multinomial realization of component weights: N categorical draws,
// returning per-component counts. Weights must be positive and sum to 1
// within 1e-9. Throws InvalidParams if any component ends up empty.
std::vector<std::int64_t> sizes_from_weights(const std::vector<double>& weights,
                                             std::int64_t total,
                                             const SeedTree& stream);

// Deterministic Fisher-Yates permutation of {0, ..., n-1}.
std::vector<std::int64_t> shuffle_indices(std::int64_t n, const SeedTree& stream);

}  // namespace srgmm
