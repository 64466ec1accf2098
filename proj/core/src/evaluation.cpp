#include "srgmm/evaluation.hpp"

#include <cmath>
#include <limits>

#include "srgmm/lloyd.hpp"

namespace srgmm {

std::vector<int> max_weight_assignment(const Matrix& score) {
  const Index n = score.rows();
  if (n < 1 || score.cols() != n)
    throw InvalidInput("assignment needs a nonempty square matrix");
  if (!score.allFinite()) throw InvalidInput("scores must be finite");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Potentials formulation over the minimization problem cost = -score,
  // with a phantom 0-th row/column for the augmenting-path bookkeeping.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -score(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> perm(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) perm[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return perm;
}

Matrix confusion_matrix(const std::vector<std::uint32_t>& planted,
                        const std::vector<std::uint32_t>& computed, int k) {
  if (k < 1) throw InvalidParams("k must be positive");
  if (planted.size() != computed.size())
    throw InvalidInput("label vectors must have the same length");
  Matrix conf = Matrix::Zero(k, k);
  for (std::size_t t = 0; t < planted.size(); ++t) {
    if (planted[t] >= static_cast<std::uint32_t>(k) ||
        computed[t] >= static_cast<std::uint32_t>(k))
      throw InvalidInput("label out of range");
    conf(planted[t], computed[t]) += 1.0;
  }
  return conf;
}

std::vector<int> match_labels(const std::vector<std::uint32_t>& planted,
                              const std::vector<std::uint32_t>& computed,
                              int k) {
  return max_weight_assignment(confusion_matrix(planted, computed, k));
}

EvalReport evaluate(const Instance& instance, const Clustering& clustering) {
  instance.validate();
  const int k = instance.params.k;
  if (clustering.centers.rows() != k ||
      clustering.centers.cols() != instance.dim())
    throw InvalidInput("clustering must have k centers of dimension d");
  if (clustering.labels.size() != static_cast<std::size_t>(instance.n()))
    throw InvalidInput("clustering labels must cover every point");

  EvalReport rep;
  const Matrix conf =
      confusion_matrix(instance.planted_labels, clustering.labels, k);
  rep.permutation = max_weight_assignment(conf);

  rep.per_cluster_symdiff.assign(static_cast<std::size_t>(k), 0);
  rep.total_misclassified = 0;
  const Eigen::VectorXd planted_sizes = conf.rowwise().sum();
  const Eigen::VectorXd computed_sizes = conf.colwise().sum();
  for (int i = 0; i < k; ++i) {
    const int j = rep.permutation[static_cast<std::size_t>(i)];
    const auto sym = static_cast<std::int64_t>(
        planted_sizes[i] + computed_sizes[j] - 2.0 * conf(i, j));
    rep.per_cluster_symdiff[static_cast<std::size_t>(i)] = sym;
    rep.total_misclassified += sym;
  }

  rep.kmeans_cost =
      kmeans_cost(instance.points, clustering.centers, clustering.labels);

  const double sigma = instance.params.sigma;
  const double assign_slack = 1e-9 * sigma * sigma;
  const double center_slack = 1e-9 * sigma;
  bool optimal = true;
  // (a) every point sits with (one of) its nearest centers
  const Eigen::VectorXd cnorm = clustering.centers.rowwise().squaredNorm();
  for (Index t = 0; t < instance.n() && optimal; ++t) {
    const Eigen::VectorXd dots = clustering.centers * instance.points.row(t).transpose();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) best = std::min(best, cnorm[i] - 2.0 * dots[i]);
    const std::uint32_t lab = clustering.labels[static_cast<std::size_t>(t)];
    if (cnorm[lab] - 2.0 * dots[lab] > best + assign_slack) optimal = false;
  }
  // (b) every nonempty cluster's center is the mean of its members
  Matrix means = Matrix::Zero(k, instance.dim());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  for (Index t = 0; t < instance.n(); ++t) {
    const std::uint32_t lab = clustering.labels[static_cast<std::size_t>(t)];
    means.row(lab) += instance.points.row(t);
    ++counts[lab];
  }
  rep.empty_computed_clusters.clear();
  for (int i = 0; i < k; ++i) {
    if (counts[static_cast<std::size_t>(i)] == 0) {
      rep.empty_computed_clusters.push_back(i);
      continue;
    }
    means.row(i) /= static_cast<double>(counts[static_cast<std::size_t>(i)]);
    if ((means.row(i) - clustering.centers.row(i)).norm() > center_slack)
      optimal = false;
  }
  rep.locally_optimal = optimal;

  rep.center_distances.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    rep.center_distances[static_cast<std::size_t>(i)] =
        (clustering.centers.row(rep.permutation[static_cast<std::size_t>(i)]) -
         instance.params.means.row(i))
            .norm() /
        sigma;
  return rep;
}

}  // namespace srgmm
