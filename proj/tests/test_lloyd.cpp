#include <doctest.h>

#include <cmath>

#include "srgmm/generator.hpp"
#include "srgmm/lloyd.hpp"
#include "srgmm/random.hpp"
#include "test_util.hpp"

using namespace srgmm;

namespace {

Matrix random_points(Index n, Index d, std::uint64_t seed) {
  const SeedTree s = SeedTree::root(seed).child("pts");
  Matrix a(n, d);
  std::uint64_t c = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = s.normal(c++);
  return a;
}

}  // namespace

TEST_CASE("assignment agrees with the plain-loop oracle") {
  const Matrix pts = random_points(500, 7, 1);
  const Matrix centers = 3.0 * random_points(6, 7, 2);
  const auto ours = assign(pts, centers);
  const auto oracle = test_oracle::naive_assign(pts, centers);
  REQUIRE(ours.size() == oracle.size());
  for (std::size_t t = 0; t < ours.size(); ++t) CHECK(ours[t] == oracle[t]);
}

TEST_CASE("assignment ties break toward the lowest center index") {
  Matrix pts(3, 1);
  pts << 0.0, 1.0, 0.5;
  Matrix centers(3, 1);
  centers << 0.0, 1.0, 1.0;  // centers 1 and 2 coincide
  const auto labels = assign(pts, centers);
  CHECK(labels[0] == 0);
  CHECK(labels[1] == 1);  // tie between coincident centers 1 and 2
  CHECK(labels[2] == 0);  // exact midpoint between centers 0 and 1
}

TEST_CASE("center update matches compensated summation, empties keep rows") {
  const Matrix pts = random_points(400, 5, 3);
  const Matrix init = random_points(5, 5, 4);
  auto labels = test_oracle::naive_assign(pts, init);
  // Force cluster 4 empty.
  for (auto& l : labels)
    if (l == 4) l = 0;
  const Matrix ours = update_centers(pts, labels, 5, init);
  const Matrix oracle = test_oracle::kahan_centers(pts, labels, 5, init);
  CHECK((ours - oracle).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(test_oracle::same_matrix(ours.row(4), init.row(4)));
}

TEST_CASE("k-means cost matches the extended-precision oracle") {
  const Matrix pts = random_points(600, 4, 5);
  const Matrix centers = random_points(4, 4, 6);
  const auto labels = assign(pts, centers);
  const double ours = kmeans_cost(pts, centers, labels);
  const long double oracle = test_oracle::naive_cost(pts, centers, labels);
  CHECK(std::fabs(ours - static_cast<double>(oracle)) <=
        1e-9 * static_cast<double>(oracle));
}

TEST_CASE("single-center problems converge in one iteration") {
  const Matrix pts = random_points(100, 3, 7);
  Matrix start = random_points(1, 3, 8);
  LloydTrace trace;
  const Clustering result = run_lloyd(pts, start, 1.0, {}, &trace);
  CHECK(result.iteration_count == 1);
  CHECK(trace.converged);
  const Vector mean = pts.colwise().mean();
  CHECK((result.centers.row(0).transpose() - mean).norm() < 1e-12);
}

TEST_CASE("a fixed point is recognized immediately") {
  Matrix pts(4, 2);
  pts << 0, 0, 0, 2, 10, 0, 10, 2;
  Matrix start(2, 2);
  start << 0, 1, 10, 1;  // exactly the cluster means
  LloydTrace trace;
  const Clustering result = run_lloyd(pts, start, 1.0, {}, &trace);
  CHECK(result.iteration_count == 1);
  CHECK(trace.converged);
  CHECK(test_oracle::same_matrix(result.centers, start));
  CHECK(trace.iterations.back().max_center_drift == 0.0);
}

TEST_CASE("final labels are the Voronoi assignment of the final centers") {
  const Matrix pts = random_points(300, 6, 9);
  const Matrix start = random_points(4, 6, 10);
  const Clustering result = run_lloyd(pts, start, 1.0);
  const auto oracle = test_oracle::naive_assign(pts, result.centers);
  CHECK(result.labels == oracle);
}

TEST_CASE("cost is non-increasing along every recorded trace") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix pts = random_points(500, 5, 100 + seed);
    const Matrix start = 2.0 * random_points(5, 5, 200 + seed);
    LloydTrace trace;
    LloydOptions opts;
    opts.max_iters = 100;
    (void)run_lloyd(pts, start, 1.0, opts, &trace);
    REQUIRE(!trace.iterations.empty());
    for (std::size_t i = 1; i < trace.iterations.size(); ++i) {
      const double prev = trace.iterations[i - 1].cost;
      const double cur = trace.iterations[i].cost;
      CHECK(cur <= prev * (1.0 + 1e-12) + 1e-12);
    }
  }
}

TEST_CASE("empty-cluster reseeding recovers a center stranded far away") {
  // Two tight blobs plus one center stranded beyond all data.
  Matrix pts(40, 2);
  const SeedTree s = SeedTree::root(42).child("blob");
  std::uint64_t c = 0;
  for (int t = 0; t < 20; ++t) {
    pts(t, 0) = 0.05 * s.normal(c++);
    pts(t, 1) = 0.05 * s.normal(c++);
    pts(20 + t, 0) = 10.0 + 0.05 * s.normal(c++);
    pts(20 + t, 1) = 0.05 * s.normal(c++);
  }
  Matrix start(3, 2);
  start << 0, 0, 10, 0, 1000, 1000;

  LloydOptions keep;
  const Clustering kept = run_lloyd(pts, start, 1.0, keep);
  CHECK((kept.centers.row(2) - start.row(2)).norm() < 1e-12);

  LloydOptions reseed;
  reseed.reseed_empty = true;
  const Clustering reseeded = run_lloyd(pts, start, 1.0, reseed);
  // The reseeded center must have landed among the data.
  bool near_data = false;
  for (Index t = 0; t < pts.rows(); ++t)
    if ((reseeded.centers.row(2) - pts.row(t)).norm() < 1.0) near_data = true;
  CHECK(near_data);
  const long double cost_kept = test_oracle::naive_cost(pts, kept.centers, kept.labels);
  const long double cost_res =
      test_oracle::naive_cost(pts, reseeded.centers, reseeded.labels);
  CHECK(static_cast<double>(cost_res) <= static_cast<double>(cost_kept) + 1e-9);
}

TEST_CASE("well-separated planted clusters are recovered from true means") {
  GeneratorRecipe r;
  r.k = 3;
  r.d = 20;
  r.sigma = 1.0;
  r.delta = 30.0;
  r.sizes = std::vector<std::int64_t>{1000, 1000, 1000};
  const auto params = resolve_recipe(r, SeedTree::root(31).child("recipe"));
  const Instance inst = generate_instance(params, AdversarySpec::identity(), 31);
  const Clustering result = run_lloyd(inst.points, inst.params.means, 1.0);
  // At separation 30 sigma the planted blocks are exactly the Voronoi cells.
  for (Index t = 0; t < inst.n(); ++t)
    CHECK(result.labels[static_cast<std::size_t>(t)] ==
          inst.planted_labels[static_cast<std::size_t>(t)]);
}

TEST_CASE("input validation") {
  const Matrix pts = random_points(10, 3, 11);
  CHECK_THROWS_AS(assign(pts, Matrix(0, 3)), InvalidInput);
  CHECK_THROWS_AS(assign(pts, Matrix::Zero(2, 4)), InvalidInput);
  CHECK_THROWS_AS(run_lloyd(pts, Matrix::Zero(2, 4), 1.0), InvalidInput);
  LloydOptions bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(run_lloyd(pts, Matrix::Zero(2, 3), 1.0, bad), InvalidParams);
}
