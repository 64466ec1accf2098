#include "srgmm/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "srgmm/linalg.hpp"
#include "srgmm/lloyd.hpp"

namespace srgmm {

namespace {

struct UnionFind {
  std::vector<Index> parent;
  explicit UnionFind(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b)
      parent[static_cast<std::size_t>(b)] = a;
    else
      parent[static_cast<std::size_t>(a)] = b;
  }
};

// Connected components of the graph joining points at distance <= gamma.
// Points are scanned in order of distance to a primary anchor so that only a
// sliding window of candidates must be inspected (an edge implies anchor
// distances within gamma of each other); extra anchors prune further and
// pairs already connected are skipped outright.
std::vector<int> graph_components(const Matrix& pts, double gamma,
                                  int* count_out) {
  const Index n = pts.rows();
  const int na = static_cast<int>(std::min<Index>(4, n));
  Matrix adist(n, na);
  adist.col(0) = (pts.rowwise() - pts.row(0)).rowwise().norm();
  Eigen::VectorXd nearest = adist.col(0);
  for (int a = 1; a < na; ++a) {
    Index far = 0;
    nearest.maxCoeff(&far);
    adist.col(a) = (pts.rowwise() - pts.row(far)).rowwise().norm();
    nearest = nearest.cwiseMin(adist.col(a));
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return adist(a, 0) < adist(b, 0);
  });

  UnionFind uf(n);
  Index ws = 0;
  for (Index pi = 0; pi < n; ++pi) {
    const Index i = order[static_cast<std::size_t>(pi)];
    while (adist(i, 0) - adist(order[static_cast<std::size_t>(ws)], 0) > gamma)
      ++ws;
    for (Index pj = ws; pj < pi; ++pj) {
      const Index j = order[static_cast<std::size_t>(pj)];
      if (uf.find(i) == uf.find(j)) continue;
      bool pruned = false;
      for (int a = 1; a < na; ++a) {
        if (std::abs(adist(i, a) - adist(j, a)) > gamma) {
          pruned = true;
          break;
        }
      }
      if (pruned) continue;
      if ((pts.row(i) - pts.row(j)).norm() <= gamma) uf.unite(i, j);
    }
  }

  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<int> root_id(static_cast<std::size_t>(n), -1);
  int m = 0;
  for (Index t = 0; t < n; ++t) {
    const Index r = uf.find(t);
    if (root_id[static_cast<std::size_t>(r)] < 0)
      root_id[static_cast<std::size_t>(r)] = m++;
    comp[static_cast<std::size_t>(t)] = root_id[static_cast<std::size_t>(r)];
  }
  if (count_out) *count_out = m;
  return comp;
}

// Mean of the original points behind each part; an empty part falls back to
// the original point whose embedded row lies nearest that part's center.
Matrix lift_centers(const Matrix& original, const std::vector<Index>& rows,
                    const Matrix& embedded, const Clustering& parts) {
  const int k = static_cast<int>(parts.centers.rows());
  Matrix centers = Matrix::Zero(k, original.cols());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t t = 0; t < parts.labels.size(); ++t) {
    const std::uint32_t lab = parts.labels[t];
    centers.row(lab) += original.row(rows[t]);
    ++counts[lab];
  }
  for (int i = 0; i < k; ++i) {
    if (counts[static_cast<std::size_t>(i)] > 0) {
      centers.row(i) /= static_cast<double>(counts[static_cast<std::size_t>(i)]);
      continue;
    }
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < embedded.rows(); ++t) {
      const double dd = (embedded.row(t) - parts.centers.row(i)).squaredNorm();
      if (dd < best_d) {
        best_d = dd;
        best = t;
      }
    }
    centers.row(i) = original.row(rows[static_cast<std::size_t>(best)]);
  }
  return centers;
}

}  // namespace

SeedingMode resolve_seeding(SeedingMode requested, double w_min, int k) {
  if (requested != SeedingMode::Auto) return requested;
  if (k < 1) throw InvalidParams("k must be positive");
  if (!(w_min > 0) || w_min > 1.0)
    throw InvalidParams("w_min must lie in (0, 1]");
  return w_min < 1.0 / (2.0 * k) ? SeedingMode::Strong : SeedingMode::Weak;
}

std::vector<Index> dsquared_seed_indices(const Matrix& points, int k,
                                         const SeedTree& stream) {
  const Index n = points.rows();
  if (k < 1) throw InvalidParams("k must be positive");
  if (n < 1 || points.cols() < 1)
    throw InvalidInput("points must be a nonempty matrix");
  if (k > n) throw InvalidParams("k cannot exceed the number of points");
  if (!points.allFinite()) throw InvalidInput("points must be finite");

  std::vector<Index> picks;
  picks.reserve(static_cast<std::size_t>(k));
  const Index first = std::min<Index>(
      n - 1, static_cast<Index>(stream.uniform(0) * static_cast<double>(n)));
  picks.push_back(first);
  Eigen::VectorXd mind2 =
      (points.rowwise() - points.row(first)).rowwise().squaredNorm();

  for (int j = 1; j < k; ++j) {
    long double total = 0.0L;
    for (Index t = 0; t < n; ++t) total += mind2[t];
    if (!(total > 0.0L))
      throw InvalidInput("fewer than k distinct points available for seeding");
    const long double target =
        static_cast<long double>(stream.uniform(static_cast<std::uint64_t>(j))) *
        total;
    Index chosen = -1, last_positive = -1;
    long double cum = 0.0L;
    for (Index t = 0; t < n; ++t) {
      const double w = mind2[t];
      if (w <= 0.0) continue;
      cum += w;
      last_positive = t;
      if (cum > target) {
        chosen = t;
        break;
      }
    }
    if (chosen < 0) chosen = last_positive;  // target fell in the rounding tail
    picks.push_back(chosen);
    mind2 = mind2.cwiseMin(
        (points.rowwise() - points.row(chosen)).rowwise().squaredNorm());
  }
  return picks;
}

Matrix dsquared_seed(const Matrix& points, int k, const SeedTree& stream) {
  const std::vector<Index> idx = dsquared_seed_indices(points, k, stream);
  Matrix centers(k, points.cols());
  for (int i = 0; i < k; ++i) centers.row(i) = points.row(idx[i]);
  return centers;
}

WeakInitResult weak_init(const Matrix& points, int k, const SeedTree& stream) {
  const Index n = points.rows();
  if (k < 1) throw InvalidParams("k must be positive");
  if (n < 1 || points.cols() < 1)
    throw InvalidInput("points must be a nonempty matrix");
  if (k > std::min(n, points.cols()))
    throw InvalidParams("k cannot exceed min(point count, dimension)");

  const LowRankProjection proj = topk_svd(points, k);
  const Matrix embedded = points * proj.basis;  // n x k
  const Matrix seeds = dsquared_seed(embedded, k, stream.child("seed"));
  Clustering parts;
  parts.centers = seeds;
  parts.labels = assign(embedded, seeds);

  std::vector<Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Index{0});
  WeakInitResult out;
  out.centers = lift_centers(points, rows, embedded, parts);
  out.alpha_diag = 8.0 * (std::log(static_cast<double>(k)) + 2.0);
  return out;
}

WeakInitResult weak_init(const Instance& instance, const SeedTree& stream) {
  instance.validate();
  WeakInitResult out = weak_init(instance.points, instance.params.k, stream);
  Matrix planted_rows(instance.n(), instance.dim());
  for (Index t = 0; t < instance.n(); ++t)
    planted_rows.row(t) = instance.params.means.row(
        instance.planted_labels[static_cast<std::size_t>(t)]);
  const double dev = spectral_norm(instance.points - planted_rows);
  const double wmin = instance.params.w_min();
  out.init_bound = 20.0 *
                   std::sqrt(instance.params.k * out.alpha_diag) * dev /
                   std::sqrt(static_cast<double>(instance.n()) * wmin);
  return out;
}

BoostedSpace boost_transform(const Matrix& points, double sigma,
                             const SeedTree& stream,
                             const std::vector<std::uint32_t>* planted_labels) {
  const Index n = points.rows();
  const Index d = points.cols();
  if (n < 2 || d < 1) throw InvalidInput("need at least two points");
  if (!(sigma > 0)) throw InvalidParams("sigma must be positive");
  if (!points.allFinite()) throw InvalidInput("points must be finite");
  if (planted_labels && planted_labels->size() != static_cast<std::size_t>(n))
    throw InvalidInput("planted labels must cover every point");

  BoostedSpace out;
  out.gamma = 4.0 * sigma *
              (std::sqrt(static_cast<double>(d)) +
               std::sqrt(std::log(static_cast<double>(n))));
  out.big_value = 1e6 * sigma * sigma * static_cast<double>(d) *
                  static_cast<double>(n);
  out.component = graph_components(points, out.gamma, &out.component_count);

  if (planted_labels) {
    std::uint32_t k = 0;
    for (const std::uint32_t lab : *planted_labels) k = std::max(k, lab + 1);
    std::vector<int> first_comp(k, -1);
    std::vector<bool> warned(k, false);
    for (Index t = 0; t < n; ++t) {
      const std::uint32_t lab = (*planted_labels)[static_cast<std::size_t>(t)];
      const int c = out.component[static_cast<std::size_t>(t)];
      if (first_comp[lab] < 0)
        first_comp[lab] = c;
      else if (first_comp[lab] != c && !warned[lab]) {
        warned[lab] = true;
        std::cerr << "warning: planted cluster " << lab
                  << " spans multiple proximity components\n";
      }
    }
  }

  const Index half = n / 2;
  const std::uint32_t k_labels =
      planted_labels
          ? *std::max_element(planted_labels->begin(), planted_labels->end()) +
                1
          : 0;
  bool split_ok = false;
  for (std::uint64_t attempt = 0; attempt < 8 && !split_ok; ++attempt) {
    const std::vector<Index> perm =
        shuffle_indices(n, stream.child("split", attempt));
    out.s1.assign(perm.begin(), perm.begin() + half);
    out.s2.assign(perm.begin() + half, perm.end());
    std::sort(out.s1.begin(), out.s1.end());
    std::sort(out.s2.begin(), out.s2.end());
    if (!planted_labels) {
      split_ok = true;
      break;
    }
    std::vector<int> in1(k_labels, 0), in2(k_labels, 0);
    for (const Index t : out.s1) ++in1[(*planted_labels)[t]];
    for (const Index t : out.s2) ++in2[(*planted_labels)[t]];
    split_ok = true;
    for (std::uint32_t c = 0; c < k_labels; ++c)
      if (in1[c] == 0 || in2[c] == 0) split_ok = false;
  }
  if (!split_ok)
    throw InvalidInput(
        "could not split the data so every planted cluster hits both halves");

  // Component means over all points (both halves).
  Matrix comp_mean = Matrix::Zero(out.component_count, d);
  std::vector<std::int64_t> comp_size(
      static_cast<std::size_t>(out.component_count), 0);
  for (Index t = 0; t < n; ++t) {
    const int c = out.component[static_cast<std::size_t>(t)];
    comp_mean.row(c) += points.row(t);
    ++comp_size[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < out.component_count; ++c)
    comp_mean.row(c) /= static_cast<double>(comp_size[static_cast<std::size_t>(c)]);

  // Same-component entries are component-centered inner products; everything
  // else is the dominating constant.
  const Index m = static_cast<Index>(out.s1.size());
  out.gram = Matrix::Constant(m, m, out.big_value);
  std::vector<std::vector<Index>> rows_of(
      static_cast<std::size_t>(out.component_count));
  for (Index r = 0; r < m; ++r)
    rows_of[static_cast<std::size_t>(
                out.component[static_cast<std::size_t>(out.s1[r])])]
        .push_back(r);
  for (int c = 0; c < out.component_count; ++c) {
    const std::vector<Index>& rows = rows_of[static_cast<std::size_t>(c)];
    if (rows.empty()) continue;
    Matrix centered(static_cast<Index>(rows.size()), d);
    for (std::size_t r = 0; r < rows.size(); ++r)
      centered.row(static_cast<Index>(r)) =
          points.row(out.s1[rows[r]]) - comp_mean.row(c);
    const Matrix block = centered * centered.transpose();
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t b = 0; b < rows.size(); ++b)
        out.gram(rows[a], rows[b]) = block(static_cast<Index>(a),
                                           static_cast<Index>(b));
  }
  return out;
}

StrongInitResult strong_init(const Matrix& points, int k, double sigma,
                             const SeedTree& stream,
                             const std::vector<std::uint32_t>* planted_labels) {
  if (k < 1) throw InvalidParams("k must be positive");
  StrongInitResult out;
  out.space = boost_transform(points, sigma, stream.child("boost"),
                              planted_labels);
  const Index m = out.space.gram.rows();
  if (k > m)
    throw InvalidParams("first half has fewer points than requested centers");

  const LowRankProjection proj = topk_svd(out.space.gram, k);
  const Matrix embedded = out.space.gram * proj.basis;  // m x k
  const Matrix seeds = dsquared_seed(embedded, k, stream.child("seed"));
  const double scale = std::max(
      embedded.norm() / std::sqrt(static_cast<double>(m) * k), 1e-300);
  LloydOptions opts;
  opts.max_iters = 100;
  const Clustering parts = run_lloyd(embedded, seeds, scale, opts);

  out.centers = lift_centers(points, out.space.s1, embedded, parts);
  return out;
}

StrongInitResult strong_init(const Instance& instance, const SeedTree& stream) {
  instance.validate();
  const int k = instance.params.k;
  const double wmin = instance.params.w_min();
  const double d = static_cast<double>(instance.dim());
  const double need = static_cast<double>(k) * k * d * d / (wmin * wmin);
  if (static_cast<double>(instance.n()) < need)
    std::cerr << "warning: N below k^2 d^2 / w_min^2; boosted seeding is "
                 "outside its guarantee regime\n";
  return strong_init(instance.points, k, instance.params.sigma, stream,
                     &instance.planted_labels);
}

Matrix initial_centers(const Instance& instance, SeedingMode mode,
                       const SeedTree& stream) {
  instance.validate();
  const SeedingMode resolved =
      resolve_seeding(mode, instance.params.w_min(), instance.params.k);
  if (resolved == SeedingMode::Weak)
    return weak_init(instance, stream.child("weak")).centers;
  return strong_init(instance, stream.child("strong")).centers;
}

}  // namespace srgmm
