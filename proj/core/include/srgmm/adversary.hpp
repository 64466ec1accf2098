#pragma once

#include <map>
#include <string>
#include <string_view>

#include "srgmm/random.hpp"
#include "srgmm/types.hpp"

namespace srgmm {

// Monotone perturbation strategy. Every strategy moves each point toward its
// own component mean: x = mu + lambda (y - mu) with lambda in [0, 1].
struct AdversarySpec {
  enum class Kind {
    Identity,          // lambda = 1 everywhere
    UniformShrink,     // lambda per point from a distribution over [0, 1]
    CoreCollapse,      // lambda = 0 for a p-fraction of each cluster
    HalfspaceCollapse, // collapse the negative halfspace along a direction
    MeanShift,         // alias: coordinated shift of the empirical mean,
                       // realized exactly as HalfspaceCollapse (the shift
                       // magnitude is fixed by the model, ~0.3989 sigma)
  };

  Kind kind = Kind::Identity;

  // UniformShrink
  bool constant_lambda = true;
  double lambda = 1.0;  // constant value
  double low = 0.0, high = 1.0;  // uniform(a, b) with 0 <= a <= b <= 1

  // CoreCollapse
  double fraction = 0.0;

  // HalfspaceCollapse / MeanShift: either one random unit direction per
  // cluster (drawn from the stream) or explicit per-cluster directions;
  // clusters without an entry are left untouched.
  bool random_directions = true;
  std::map<int, Vector> directions;

  static AdversarySpec identity();
  static AdversarySpec uniform_shrink_constant(double lambda);
  static AdversarySpec uniform_shrink(double low, double high);
  static AdversarySpec core_collapse(double fraction);
  static AdversarySpec halfspace_collapse_random();
  static AdversarySpec halfspace_collapse(std::map<int, Vector> directions);
  static AdversarySpec mean_shift(std::map<int, Vector> directions);

  // Compact JSON descriptor, e.g. {"kind":"uniform_shrink","dist":"uniform",...}
  std::string to_json_text() const;
  static AdversarySpec from_json_text(std::string_view text);

  // Throws InvalidSpec on out-of-range parameters, non-unit directions, or
  // cluster indices >= k (d/k checked when known; pass d = -1, k = -1 to skip).
  void validate(Index d, int k) const;
};

// Collapse map for a single point: returns mu when <y - mu, e_hat> < 0 and y
// otherwise (boundary kept). e_hat must be a unit vector.
Vector halfspace_collapse_map(const Vector& y, const Vector& mu,
                              const Vector& e_hat);

// Apply a strategy. `instance_pre` carries the raw Gaussian draws as its
// points; the result has the perturbed points, the inputs preserved as
// pre_perturbation_points, unchanged labels, and provenance recording the
// strategy descriptor.
Instance perturb(const Instance& instance_pre, const AdversarySpec& spec,
                 const SeedTree& stream);

}  // namespace srgmm
