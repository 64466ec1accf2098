#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srgmm/lloyd.hpp"
#include "srgmm/types.hpp"

namespace srgmm {

struct LowerBoundParams {
  int d = 0;
  int k = 0;  // must be even: clusters come in pairs
  Index n = 0;
  double delta = 0;      // within-pair mean separation, in units of sigma
  Index m = 0;           // designated points per pair
  double m_factor = 100;  // cross-pair separation multiple of delta * sigma
  double sigma = 1.0;
};

struct LowerBoundInstance {
  Instance instance;
  // m global point indices per pair, concatenated in pair order. These are
  // the early points of each pair's second (non-collapsed) cluster.
  std::vector<Index> designated;
  Matrix collapse_directions;      // (k/2) x d unit rows
  std::vector<double> u_norm_sq;   // squared norm of each direction pre-scaling
  std::string delta_regime;        // "formal" | "informal"
  bool size_condition_ok = true;   // 64 m ln m <= d
};

// Throws InvalidParams when a hard precondition fails:
// k even and >= 2, m >= 1, m <= n / (2k), sqrt(ln n) <= delta, m_factor >= 10.
void validate_lowerbound(const LowerBoundParams& params);

// Paired construction: each pair sits on its own far-away anchor, the two
// means of a pair are exactly delta * sigma apart, and the first cluster of
// each pair is halfspace-collapsed along the direction spelled out by the
// early noise of the second cluster's designated points. Throws when the
// designated-point projection onto that direction falls below half of
// sigma * sqrt(d/m).
LowerBoundInstance build_lowerbound(const LowerBoundParams& params,
                                    std::uint64_t seed);

struct LowerBoundCertificate {
  bool ok = false;
  std::int64_t designated_total = 0;
  std::int64_t designated_misclassified = 0;
  double designated_misclassified_fraction = 0;
  double threshold = 0.9;

  // Construction diagnostics, all recomputed from the instance:
  double min_designated_projection = 0;  // units of sigma sqrt(d/m); want >= 0.5
  double max_u_norm_dev = 0;             // worst |u_norm_sq - 1|
  double u_norm_bound = 0;               // 6 sqrt(m ln(mk) / d)
  double min_cross_pair_distance = 0;    // between means of distinct pairs
  double cross_bound = 0;                // m_factor * delta * sigma
  double min_collapse_shift = 0;         // realized even-mean shift along e_p
  std::string delta_regime;
  bool size_condition_ok = true;
};

// A clustering "certifies" the lower bound when at least `threshold` of the
// designated points land outside their planted cluster under the
// agreement-maximizing matching, and the construction diagnostics hold.
LowerBoundCertificate certify(const LowerBoundInstance& lb,
                              const Clustering& clustering,
                              double threshold = 0.9);

// Runs Lloyd's iterations started from the planted clusters' empirical means
// and certifies the result.
LowerBoundCertificate certify_with_lloyd(const LowerBoundInstance& lb,
                                         const LloydOptions& opts = {},
                                         double threshold = 0.9,
                                         Clustering* out_clustering = nullptr);

}  // namespace srgmm
