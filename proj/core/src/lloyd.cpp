#include "srgmm/lloyd.hpp"

#include <cmath>
#include <limits>

namespace srgmm {

namespace {

constexpr Index kAssignBlock = 8192;

void check_pair(const Matrix& points, const Matrix& centers) {
  if (points.rows() < 1 || points.cols() < 1)
    throw InvalidInput("points must be a nonempty matrix");
  if (centers.rows() < 1)
    throw InvalidInput("need at least one center");
  if (centers.cols() != points.cols())
    throw InvalidInput("points and centers must have the same dimension");
  if (!points.allFinite() || !centers.allFinite())
    throw InvalidInput("points and centers must be finite");
}

}  // namespace

std::vector<std::uint32_t> assign(const Matrix& points, const Matrix& centers) {
  check_pair(points, centers);
  const Index n = points.rows();
  const Index k = centers.rows();
  const Eigen::VectorXd cnorm = centers.rowwise().squaredNorm();
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(n));
  for (Index start = 0; start < n; start += kAssignBlock) {
    const Index len = std::min(kAssignBlock, n - start);
    // Expanded form: ||x - c||^2 = ||x||^2 - 2 <x, c> + ||c||^2; the ||x||^2
    // term is constant per point, so the argmin only needs the last two.
    const Matrix dots = points.middleRows(start, len) * centers.transpose();
    for (Index t = 0; t < len; ++t) {
      Index best = 0;
      double best_score = cnorm[0] - 2.0 * dots(t, 0);
      for (Index i = 1; i < k; ++i) {
        const double score = cnorm[i] - 2.0 * dots(t, i);
        if (score < best_score) {
          best_score = score;
          best = i;
        }
      }
      labels[static_cast<std::size_t>(start + t)] =
          static_cast<std::uint32_t>(best);
    }
  }
  return labels;
}

Matrix update_centers(const Matrix& points,
                      const std::vector<std::uint32_t>& labels, int k,
                      const Matrix& previous) {
  if (k < 1) throw InvalidParams("k must be positive");
  if (labels.size() != static_cast<std::size_t>(points.rows()))
    throw InvalidInput("labels size must match point count");
  if (previous.rows() != k || previous.cols() != points.cols())
    throw InvalidInput("previous centers must be k x d");
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  for (Index t = 0; t < points.rows(); ++t) {
    const std::uint32_t c = labels[static_cast<std::size_t>(t)];
    if (c >= static_cast<std::uint32_t>(k))
      throw InvalidInput("label out of range");
    sums.row(c) += points.row(t);
    ++counts[c];
  }
  for (int i = 0; i < k; ++i) {
    if (counts[static_cast<std::size_t>(i)] == 0)
      sums.row(i) = previous.row(i);
    else
      sums.row(i) /= static_cast<double>(counts[static_cast<std::size_t>(i)]);
  }
  return sums;
}

double kmeans_cost(const Matrix& points, const Matrix& centers,
                   const std::vector<std::uint32_t>& labels) {
  check_pair(points, centers);
  if (labels.size() != static_cast<std::size_t>(points.rows()))
    throw InvalidInput("labels size must match point count");
  long double total = 0.0L;
  for (Index t = 0; t < points.rows(); ++t) {
    const std::uint32_t c = labels[static_cast<std::size_t>(t)];
    if (c >= static_cast<std::uint32_t>(centers.rows()))
      throw InvalidInput("label out of range");
    total += static_cast<long double>(
        (points.row(t) - centers.row(c)).squaredNorm());
  }
  return static_cast<double>(total);
}

Clustering run_lloyd(const Matrix& points, const Matrix& initial_centers,
                     double sigma, const LloydOptions& opts,
                     LloydTrace* trace) {
  check_pair(points, initial_centers);
  if (!(sigma > 0)) throw InvalidParams("sigma must be positive");
  if (opts.max_iters < 1) throw InvalidParams("max_iters must be positive");
  if (!(opts.drift_tol >= 0)) throw InvalidParams("drift_tol must be >= 0");

  const int k = static_cast<int>(initial_centers.rows());
  Matrix centers = initial_centers;
  std::vector<std::uint32_t> labels = assign(points, centers);
  if (trace) {
    trace->iterations.clear();
    trace->converged = false;
  }

  bool converged = false;
  int iters = 0;
  for (int r = 1; r <= opts.max_iters; ++r) {
    Matrix next = update_centers(points, labels, k, centers);
    if (opts.reseed_empty) {
      std::vector<bool> seen(static_cast<std::size_t>(k), false);
      for (const std::uint32_t c : labels) seen[c] = true;
      for (int i = 0; i < k; ++i) {
        if (seen[static_cast<std::size_t>(i)]) continue;
        Index far = 0;
        double far_d = -1.0;
        for (Index t = 0; t < points.rows(); ++t) {
          const double dd = (points.row(t) - centers.row(i)).squaredNorm();
          if (dd > far_d) {
            far_d = dd;
            far = t;
          }
        }
        next.row(i) = points.row(far);
      }
    }
    const double drift = (next - centers).rowwise().norm().maxCoeff();
    std::vector<std::uint32_t> next_labels = assign(points, next);
    std::int64_t reassigned = 0;
    for (std::size_t t = 0; t < labels.size(); ++t)
      if (labels[t] != next_labels[t]) ++reassigned;

    centers = std::move(next);
    labels = std::move(next_labels);
    iters = r;
    if (trace) {
      LloydIterationRecord rec;
      rec.iteration = r;
      rec.centers = centers;
      rec.max_center_drift = drift;
      rec.cost = kmeans_cost(points, centers, labels);
      rec.reassigned = reassigned;
      trace->iterations.push_back(std::move(rec));
    }
    if (reassigned == 0 || drift <= opts.drift_tol * sigma) {
      converged = true;
      break;
    }
  }
  if (trace) trace->converged = converged;

  Clustering out;
  out.centers = std::move(centers);
  out.labels = std::move(labels);
  out.iteration_count = iters;
  return out;
}

}  // namespace srgmm
