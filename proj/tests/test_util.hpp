#pragma once

// Independent reference implementations ("oracles") used to cross-check the
// library. Everything here is written from first principles with plain loops
// and compensated or extended-precision accumulation, deliberately avoiding
// the code paths under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "srgmm/random.hpp"
#include "srgmm/types.hpp"

namespace test_oracle {

// Nearest-center assignment with plain per-coordinate loops and strict
// comparison (ties keep the lowest center index).
inline std::vector<std::uint32_t> naive_assign(const srgmm::Matrix& points,
                                               const srgmm::Matrix& centers) {
  const auto n = points.rows();
  const auto k = centers.rows();
  const auto d = points.cols();
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(n), 0);
  for (srgmm::Index t = 0; t < n; ++t) {
    long double best = -1;
    std::uint32_t arg = 0;
    for (srgmm::Index i = 0; i < k; ++i) {
      long double dist = 0;
      for (srgmm::Index j = 0; j < d; ++j) {
        const long double diff = static_cast<long double>(points(t, j)) -
                                 static_cast<long double>(centers(i, j));
        dist += diff * diff;
      }
      if (best < 0 || dist < best) {
        best = dist;
        arg = static_cast<std::uint32_t>(i);
      }
    }
    labels[static_cast<std::size_t>(t)] = arg;
  }
  return labels;
}

// Per-cluster means via Kahan-compensated summation; empty clusters keep the
// row from `previous`.
inline srgmm::Matrix kahan_centers(const srgmm::Matrix& points,
                                   const std::vector<std::uint32_t>& labels,
                                   int k, const srgmm::Matrix& previous) {
  const auto d = points.cols();
  srgmm::Matrix sums = srgmm::Matrix::Zero(k, d);
  srgmm::Matrix comp = srgmm::Matrix::Zero(k, d);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  for (srgmm::Index t = 0; t < points.rows(); ++t) {
    const int i = static_cast<int>(labels[static_cast<std::size_t>(t)]);
    ++counts[static_cast<std::size_t>(i)];
    for (srgmm::Index j = 0; j < d; ++j) {
      const double y = points(t, j) - comp(i, j);
      const double s = sums(i, j) + y;
      comp(i, j) = (s - sums(i, j)) - y;
      sums(i, j) = s;
    }
  }
  srgmm::Matrix centers(k, d);
  for (int i = 0; i < k; ++i) {
    if (counts[static_cast<std::size_t>(i)] == 0) {
      centers.row(i) = previous.row(i);
    } else {
      centers.row(i) =
          sums.row(i) / static_cast<double>(counts[static_cast<std::size_t>(i)]);
    }
  }
  return centers;
}

// k-means objective with long-double accumulation and plain loops.
inline long double naive_cost(const srgmm::Matrix& points,
                              const srgmm::Matrix& centers,
                              const std::vector<std::uint32_t>& labels) {
  long double total = 0;
  for (srgmm::Index t = 0; t < points.rows(); ++t) {
    const auto i = static_cast<srgmm::Index>(labels[static_cast<std::size_t>(t)]);
    for (srgmm::Index j = 0; j < points.cols(); ++j) {
      const long double diff = static_cast<long double>(points(t, j)) -
                               static_cast<long double>(centers(i, j));
      total += diff * diff;
    }
  }
  return total;
}

// Maximum total score over all k! assignments (rows to columns), by explicit
// enumeration. Feasible for k <= 8.
inline double brute_force_assignment_score(const srgmm::Matrix& score) {
  const int k = static_cast<int>(score.rows());
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double total = 0;
    for (int i = 0; i < k; ++i) total += score(i, perm[static_cast<std::size_t>(i)]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Total symmetric difference under a fixed matching, tallied point by point:
// sum_i |C_i (planted) symdiff C'_{perm[i]} (computed)|.
inline std::int64_t symdiff_under_perm(const std::vector<std::uint32_t>& planted,
                                       const std::vector<std::uint32_t>& computed,
                                       int k, const std::vector<int>& perm) {
  std::int64_t total = 0;
  for (int i = 0; i < k; ++i) {
    const auto ci = static_cast<std::uint32_t>(i);
    const auto cc = static_cast<std::uint32_t>(perm[static_cast<std::size_t>(i)]);
    for (std::size_t t = 0; t < planted.size(); ++t) {
      const bool in_planted = planted[t] == ci;
      const bool in_computed = computed[t] == cc;
      if (in_planted != in_computed) ++total;
    }
  }
  return total;
}

// Minimum total symmetric difference over all k! matchings.
inline std::int64_t brute_force_symdiff(const std::vector<std::uint32_t>& planted,
                                        const std::vector<std::uint32_t>& computed,
                                        int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  do {
    best = std::min(best, symdiff_under_perm(planted, computed, k, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Dense singular values (nonincreasing) through Eigen's BDC bidiagonalization,
// on a column-major copy so nothing is shared with the library's row-major
// paths.
inline Eigen::VectorXd dense_singular_values(const srgmm::Matrix& a) {
  Eigen::MatrixXd copy = a;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(copy);
  return svd.singularValues();
}

inline double dense_spectral_norm(const srgmm::Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  return dense_singular_values(a)(0);
}

// Top-k right singular subspace from the dense decomposition.
inline Eigen::MatrixXd dense_right_basis(const srgmm::Matrix& a, int k) {
  Eigen::MatrixXd copy = a;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(copy, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixV().leftCols(k);
}

// Standard normal upper tail P[Z >= t] in closed form.
inline double normal_tail(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

inline double normal_pdf(double t) {
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
}

// Exact marginal distribution of the SECOND distance-squared-sampled pick:
// first pick uniform over rows, second proportional to squared distance to
// the first. Long-double enumeration.
inline std::vector<double> exact_second_pick(const srgmm::Matrix& points) {
  const auto n = points.rows();
  std::vector<long double> prob(static_cast<std::size_t>(n), 0.0L);
  for (srgmm::Index first = 0; first < n; ++first) {
    long double denom = 0;
    std::vector<long double> w(static_cast<std::size_t>(n), 0.0L);
    for (srgmm::Index j = 0; j < n; ++j) {
      long double dist = 0;
      for (srgmm::Index c = 0; c < points.cols(); ++c) {
        const long double diff = static_cast<long double>(points(j, c)) -
                                 static_cast<long double>(points(first, c));
        dist += diff * diff;
      }
      w[static_cast<std::size_t>(j)] = dist;
      denom += dist;
    }
    for (srgmm::Index j = 0; j < n; ++j)
      prob[static_cast<std::size_t>(j)] +=
          w[static_cast<std::size_t>(j)] / denom / static_cast<long double>(n);
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<double>(prob[j]);
  return out;
}

inline double total_variation(const std::vector<double>& p,
                              const std::vector<double>& q) {
  long double tv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    tv += std::fabs(static_cast<long double>(p[i]) - static_cast<long double>(q[i]));
  return static_cast<double>(tv / 2);
}

// Count of points whose centered projection on `v` reaches lambda*sigma in
// absolute value — the quantity behind the adversarial direction search,
// recomputed with plain loops.
inline std::int64_t naive_bad_count(const srgmm::Matrix& points,
                                    const std::vector<std::uint32_t>& labels,
                                    const srgmm::Matrix& means, double sigma,
                                    double lambda, const srgmm::Vector& v) {
  std::int64_t count = 0;
  for (srgmm::Index t = 0; t < points.rows(); ++t) {
    const auto i = static_cast<srgmm::Index>(labels[static_cast<std::size_t>(t)]);
    long double proj = 0;
    for (srgmm::Index j = 0; j < points.cols(); ++j)
      proj += (static_cast<long double>(points(t, j)) -
               static_cast<long double>(means(i, j))) *
              static_cast<long double>(v(j));
    if (std::fabs(static_cast<double>(proj)) >= lambda * sigma) ++count;
  }
  return count;
}

// Exhaustive 1-degree grid over directions in the plane (d = 2 only).
inline std::int64_t grid_max_bad_count_2d(const srgmm::Matrix& points,
                                          const std::vector<std::uint32_t>& labels,
                                          const srgmm::Matrix& means, double sigma,
                                          double lambda) {
  std::int64_t best = 0;
  for (int deg = 0; deg < 360; ++deg) {
    const double theta = deg * M_PI / 180.0;
    srgmm::Vector v(2);
    v << std::cos(theta), std::sin(theta);
    best = std::max(best, naive_bad_count(points, labels, means, sigma, lambda, v));
  }
  return best;
}

// Exact (bit-level, via subtraction) equality of two Eigen expressions.
template <class A, class B>
inline bool same_matrix(const A& a, const B& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).norm() == 0.0;
}

// Convenience: hand-built spherical instance around explicit means.
inline srgmm::Instance make_instance(const srgmm::Matrix& points,
                                     const std::vector<std::uint32_t>& labels,
                                     const srgmm::Matrix& means, double sigma,
                                     std::uint64_t seed = 0) {
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(means.rows()), 0);
  for (auto l : labels) ++sizes[static_cast<std::size_t>(l)];
  srgmm::Instance inst;
  inst.params = srgmm::MixtureParams::create_spherical(means, sigma, sizes);
  inst.points = points;
  inst.planted_labels = labels;
  inst.provenance.seed = seed;
  inst.provenance.adversary = "{\"kind\":\"identity\"}";
  return inst;
}

}  // namespace test_oracle
