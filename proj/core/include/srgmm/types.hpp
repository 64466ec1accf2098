#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srgmm {

// Row-major so that point rows are contiguous (binary IO, per-point loops).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Model parameters, inputs, or spec descriptors are out of range / inconsistent.
struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Data handed to an operation violates its preconditions.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An adversary (or config) descriptor is malformed.
struct InvalidSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iterative numerical routine ran out of iterations.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), last_residual(residual) {}
  double last_residual = 0.0;
};

// Per-component covariance. `bound()` is the spectral norm, which the model
// caps at sigma^2.
struct CovarianceSpec {
  enum class Kind { Spherical, Diagonal, Full };
  Kind kind = Kind::Spherical;
  double spherical_sigma = 1.0;  // Kind::Spherical: covariance is sigma_i^2 * I
  Vector diagonal;               // Kind::Diagonal: per-coordinate variances
  Matrix full;                   // Kind::Full: full PSD covariance matrix

  static CovarianceSpec spherical(double sigma_i);
  static CovarianceSpec diag(Vector variances);
  static CovarianceSpec dense(Matrix cov);

  double bound() const;  // spectral norm of the covariance
  void validate(Index d, double sigma) const;
};

// Mixture model: k component means in R^d, per-component covariances with
// spectral norm <= sigma^2, and adversary-chosen partition sizes N_i.
// Construct through `create` so the invariants are checked once, up front.
struct MixtureParams {
  int k = 0;
  Index d = 0;
  Matrix means;  // k x d, one mean per row
  double sigma = 1.0;
  std::vector<CovarianceSpec> covariances;
  std::vector<std::int64_t> cluster_sizes;

  static MixtureParams create(Matrix means, double sigma,
                              std::vector<CovarianceSpec> covariances,
                              std::vector<std::int64_t> cluster_sizes);
  // All components spherical with the model-level sigma.
  static MixtureParams create_spherical(Matrix means, double sigma,
                                        std::vector<std::int64_t> cluster_sizes);

  std::int64_t total_points() const;
  double w_min() const;  // min_i N_i / N
};

// Minimum pairwise mean distance in units of sigma. Needs k >= 2.
double separation(const MixtureParams& params);

struct Provenance {
  std::uint64_t seed = 0;
  std::string adversary;  // descriptor string of the applied adversary
};

// A realized clustering problem: N points in R^d with planted labels and,
// when produced in-process, the pre-perturbation Gaussian draws.
struct Instance {
  Matrix points;                      // N x d
  std::vector<std::uint32_t> planted_labels;
  std::optional<Matrix> pre_perturbation_points;  // N x d when retained
  MixtureParams params;
  Provenance provenance;

  std::int64_t n() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  // Throws InvalidInput if shapes/labels disagree with params.
  void validate() const;
};

// Every perturbed point must be an inward move: x - mu_i = lambda (y - mu_i)
// with a single lambda in [0,1] recovered componentwise.
struct MonotoneCertificate {
  bool ok = true;
  std::vector<std::int64_t> violations;  // point indices (at most 16 kept)
};
MonotoneCertificate verify_monotone_certificate(const Instance& instance,
                                                double rel_tol = 1e-9);

struct Clustering {
  Matrix centers;  // k x d
  std::vector<std::uint32_t> labels;
  int iteration_count = 0;
};

// Result of matching a computed clustering against the planted one.
// `permutation[i]` is the computed cluster matched to planted cluster i, the
// bijection minimizing the total symmetric difference. `total_misclassified`
// is that minimized sum; each misplaced point appears in two symmetric
// differences, so the number of distinct misplaced points is half of it.
struct EvalReport {
  std::vector<int> permutation;
  std::vector<std::int64_t> per_cluster_symdiff;  // indexed by planted cluster
  std::int64_t total_misclassified = 0;
  double kmeans_cost = 0.0;
  bool locally_optimal = false;
  std::vector<double> center_distances;  // ||centers[perm[i]] - mu_i|| / sigma
  std::vector<int> empty_computed_clusters;
};

}  // namespace srgmm
