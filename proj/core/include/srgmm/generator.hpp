#pragma once

#include <optional>
#include <string>

#include "srgmm/adversary.hpp"
#include "srgmm/random.hpp"
#include "srgmm/types.hpp"

namespace srgmm {

// How component means are placed for a requested separation.
enum class MeanPlacement {
  // k orthonormal directions scaled by delta*sigma/sqrt(2); every pairwise
  // distance is exactly delta*sigma. Needs k <= d.
  Orthogonal,
  // k random unit directions rescaled so the minimum pairwise distance is
  // exactly delta*sigma. Works for any k, d (directions must not collide).
  Random,
};

Matrix place_separated_means(int k, Index d, double delta, double sigma,
                             const SeedTree& stream,
                             MeanPlacement placement = MeanPlacement::Orthogonal);

// Declarative description of a model, resolved into MixtureParams with a
// stream (weights -> multinomial sizes, delta -> placed means).
struct GeneratorRecipe {
  int k = 0;
  Index d = 0;
  double sigma = 1.0;
  std::optional<Matrix> means;   // explicit means, or
  double delta = 0.0;            // separation for placed means
  MeanPlacement placement = MeanPlacement::Orthogonal;
  std::optional<std::vector<std::int64_t>> sizes;  // explicit sizes, or
  std::optional<std::vector<double>> weights;      // weights + N
  std::int64_t total = 0;                          // N (with weights)
  std::vector<CovarianceSpec> covariances;         // empty = spherical(sigma)
};

MixtureParams resolve_recipe(const GeneratorRecipe& recipe,
                             const SeedTree& stream);

// Sample the semi-random model end to end: per-cluster Gaussian draws
// (contiguous label blocks), then the adversary. The result keeps the raw
// draws as pre_perturbation_points.
Instance generate_instance(const MixtureParams& params,
                           const AdversarySpec& adversary, std::uint64_t seed);

}  // namespace srgmm
