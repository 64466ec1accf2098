#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "srgmm/random.hpp"
#include "srgmm/types.hpp"

namespace srgmm {

enum class SeedingMode { Weak, Strong, Auto };

// Auto rule: strong seeding iff the smallest cluster weight is below 1/(2k).
SeedingMode resolve_seeding(SeedingMode requested, double w_min, int k);

// Distance-squared-weighted seeding (k-means++ style): the first center is
// uniform, each later one is drawn proportionally to the squared distance to
// the nearest already-chosen center. Returns the chosen row indices in pick
// order. Throws InvalidInput when fewer than k distinct rows exist.
std::vector<Index> dsquared_seed_indices(const Matrix& points, int k,
                                         const SeedTree& stream);
Matrix dsquared_seed(const Matrix& points, int k, const SeedTree& stream);

struct WeakInitResult {
  Matrix centers;  // k x d, in the original space
  // Expected approximation factor of the seeding step: 8 (ln k + 2).
  double alpha_diag = 0;
  // Center-accuracy diagnostic, 20 sqrt(k * alpha) * ||A - M*|| / sqrt(N w_min);
  // NaN unless planted parameters were available.
  double init_bound = std::numeric_limits<double>::quiet_NaN();
};

// Project onto the top-k singular subspace of the data, seed by squared
// distance there, and lift each part back as the mean of its original points
// (an empty part falls back to the original point nearest its seed).
WeakInitResult weak_init(const Matrix& points, int k, const SeedTree& stream);
WeakInitResult weak_init(const Instance& instance, const SeedTree& stream);

struct BoostedSpace {
  Matrix gram;                 // |S1| x |S1| boosted similarity matrix
  std::vector<Index> s1;       // original row indices behind gram's rows
  std::vector<Index> s2;       // the complement half
  std::vector<int> component;  // proximity-graph component id per point
  int component_count = 0;
  double gamma = 0;      // edge threshold of the proximity graph
  double big_value = 0;  // constant used for cross-component entries
};

// Imbalance-boosting transform: split the data into two halves, connect
// points within gamma = 4 sigma (sqrt(d) + sqrt(ln N)), and build, on the
// first half, the matrix of component-mean-centered inner products with
// cross-component entries replaced by a dominating constant. When planted
// labels are supplied the split is retried (up to 8 times) until every
// planted cluster appears in both halves, and a warning is printed if a
// planted cluster spans several components.
BoostedSpace boost_transform(
    const Matrix& points, double sigma, const SeedTree& stream,
    const std::vector<std::uint32_t>* planted_labels = nullptr);

struct StrongInitResult {
  Matrix centers;  // k x d, in the original space
  BoostedSpace space;
};

// Boosted seeding for imbalanced mixtures: boost_transform, then top-k
// spectral embedding of the boosted matrix, squared-distance seeding plus
// Lloyd's iterations in the embedded space, and lifting each part back as
// the mean of its original first-half points.
StrongInitResult strong_init(
    const Matrix& points, int k, double sigma, const SeedTree& stream,
    const std::vector<std::uint32_t>* planted_labels = nullptr);
StrongInitResult strong_init(const Instance& instance, const SeedTree& stream);

// Dispatch on the (resolved) seeding mode; Auto is resolved from the
// instance's planted weights first.
Matrix initial_centers(const Instance& instance, SeedingMode mode,
                       const SeedTree& stream);

}  // namespace srgmm
