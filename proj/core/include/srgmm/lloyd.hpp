#pragma once

#include <cstdint>
#include <vector>

#include "srgmm/types.hpp"

namespace srgmm {

struct LloydOptions {
  int max_iters = 200;
  // Converged when every center moves less than drift_tol * sigma between
  // consecutive iterations (sigma passed to run_lloyd).
  double drift_tol = 1e-6;
  // When a cluster receives no points: false keeps its previous center,
  // true reseeds it at the point farthest from its current center.
  bool reseed_empty = false;
};

struct LloydIterationRecord {
  int iteration = 0;           // 1-based
  Matrix centers;              // centers after this iteration's update
  double max_center_drift = 0; // max row-norm change vs previous centers
  double cost = 0;             // k-means cost of (centers, labels) after update
  std::int64_t reassigned = 0; // points whose label changed this iteration
};

struct LloydTrace {
  std::vector<LloydIterationRecord> iterations;
  bool converged = false;  // stopped by drift/assignment criterion, not cap
};

// Nearest-center labels; ties broken toward the lowest center index.
std::vector<std::uint32_t> assign(const Matrix& points, const Matrix& centers);

// Per-cluster means of the assigned points. Empty clusters keep the row from
// `previous` (which must be k x d).
Matrix update_centers(const Matrix& points,
                      const std::vector<std::uint32_t>& labels, int k,
                      const Matrix& previous);

double kmeans_cost(const Matrix& points, const Matrix& centers,
                   const std::vector<std::uint32_t>& labels);

// Lloyd's iterations from the given initial centers. The returned labels are
// the Voronoi assignment to the final centers.
Clustering run_lloyd(const Matrix& points, const Matrix& initial_centers,
                     double sigma, const LloydOptions& opts = {},
                     LloydTrace* trace = nullptr);

}  // namespace srgmm
