#pragma once

#include "srgmm/types.hpp"

namespace srgmm {

// Top-k right-singular subspace of A. `basis` is d x k with orthonormal
// columns; projecting rows of A onto it reproduces the best rank-k
// approximation up to the contract below; `singular_values` holds the top k
// singular values in nonincreasing order.
struct LowRankProjection {
  Matrix basis;
  Vector singular_values;
};

// Contract: ||A - A basis basis^T||_2 <= sigma_{k+1}(A) * (1 + tol).
// Small problems are solved exactly through the Gram matrix; larger ones use
// randomized subspace iteration with a fixed internal seed, throwing
// ConvergenceError (carrying the last residual estimate) if the singular
// values have not stabilized within max_iters sweeps.
LowRankProjection topk_svd(const Matrix& a, int k, double tol = 1e-6,
                           int max_iters = 300);

// Largest singular value within relative `tol` (same exact-vs-iterative split
// and error behavior as topk_svd). Zero matrices give 0.
double spectral_norm(const Matrix& a, double tol = 1e-6, int max_iters = 300);

}  // namespace srgmm
