#include <doctest.h>

#include <cmath>

#include "srgmm/lowerbound.hpp"
#include "test_util.hpp"

using namespace srgmm;

namespace {

LowerBoundParams small_params() {
  LowerBoundParams p;
  p.d = 64;
  p.k = 4;
  p.n = 8000;
  p.delta = 5.0;
  p.m = 2;
  p.m_factor = 100.0;
  p.sigma = 1.0;
  return p;
}

}  // namespace

TEST_CASE("lower-bound parameter validation") {
  LowerBoundParams p = small_params();
  CHECK_NOTHROW(validate_lowerbound(p));

  p = small_params();
  p.k = 3;
  CHECK_THROWS_AS(validate_lowerbound(p), InvalidParams);

  p = small_params();
  p.m = 0;
  CHECK_THROWS_AS(validate_lowerbound(p), InvalidParams);

  p = small_params();
  p.m = p.n / (2 * p.k) + 1;
  CHECK_THROWS_AS(validate_lowerbound(p), InvalidParams);

  p = small_params();
  p.delta = 2.0;  // sqrt(ln 8000) = 3.0 exceeds delta
  CHECK_THROWS_AS(validate_lowerbound(p), InvalidParams);

  p = small_params();
  p.m_factor = 5.0;
  CHECK_THROWS_AS(validate_lowerbound(p), InvalidParams);
}

TEST_CASE("construction geometry: pair separation, crossing distance, units") {
  const auto lb = build_lowerbound(small_params(), 3);
  const Instance& inst = lb.instance;
  CHECK_NOTHROW(inst.validate());
  CHECK(inst.n() == 8000);
  CHECK(inst.dim() == 64);
  REQUIRE(inst.params.k == 4);

  const Matrix& means = inst.params.means;
  // Within-pair distances are exactly delta * sigma.
  CHECK((means.row(0) - means.row(1)).norm() ==
        doctest::Approx(5.0).epsilon(1e-9));
  CHECK((means.row(2) - means.row(3)).norm() ==
        doctest::Approx(5.0).epsilon(1e-9));
  // Cross-pair distances reach the m_factor multiple.
  for (int a : {0, 1})
    for (int b : {2, 3})
      CHECK((means.row(a) - means.row(b)).norm() >= 100.0 * 5.0 * (1 - 1e-9));

  // One unit collapse direction per pair.
  REQUIRE(lb.collapse_directions.rows() == 2);
  REQUIRE(lb.collapse_directions.cols() == 64);
  for (int p = 0; p < 2; ++p)
    CHECK(lb.collapse_directions.row(p).norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Directions are built from near-unit aggregated noise.
  const double u_bound = 6.0 * std::sqrt(2.0 * std::log(2.0 * 4.0) / 64.0);
  REQUIRE(lb.u_norm_sq.size() == 2);
  for (double usq : lb.u_norm_sq) CHECK(std::fabs(usq - 1.0) <= u_bound);

  // Regime labels at these parameters.
  CHECK(lb.delta_regime == "formal");  // 5 > 64 / (4 ln 64)
  CHECK_FALSE(lb.size_condition_ok);   // 64 m ln m = 88.7 > d = 64
}

TEST_CASE("designated points live in the odd clusters and project strongly") {
  const auto lb = build_lowerbound(small_params(), 4);
  const Instance& inst = lb.instance;
  REQUIRE(lb.designated.size() == 4);  // m=2 per pair, 2 pairs
  const double want = 0.5 * std::sqrt(64.0 / 2.0);
  for (std::size_t j = 0; j < lb.designated.size(); ++j) {
    const Index t = lb.designated[j];
    const int pair = static_cast<int>(j / 2);
    const std::uint32_t label = inst.planted_labels[static_cast<std::size_t>(t)];
    CHECK(label == static_cast<std::uint32_t>(2 * pair + 1));
    const auto mu = inst.params.means.row(static_cast<Index>(label));
    const double proj =
        (inst.points.row(t) - mu).dot(lb.collapse_directions.row(pair));
    CHECK(proj >= want * (1 - 1e-9));
  }
}

TEST_CASE("the collapsed clusters shift by about 0.399 sigma along the direction") {
  const auto lb = build_lowerbound(small_params(), 5);
  const Instance& inst = lb.instance;
  // Even clusters (first of each pair) are halfspace-collapsed.
  for (int pair = 0; pair < 2; ++pair) {
    const int cluster = 2 * pair;
    Vector sum = Vector::Zero(64);
    std::int64_t count = 0;
    for (Index t = 0; t < inst.n(); ++t) {
      if (inst.planted_labels[static_cast<std::size_t>(t)] !=
          static_cast<std::uint32_t>(cluster))
        continue;
      sum += (inst.points.row(t) - inst.params.means.row(cluster)).transpose();
      ++count;
    }
    const double shift =
        (sum / static_cast<double>(count)).dot(lb.collapse_directions.row(pair));
    CHECK(std::fabs(shift - 1.0 / std::sqrt(2.0 * M_PI)) < 0.1);
  }
  CHECK(verify_monotone_certificate(inst).ok);
}

TEST_CASE("construction is bit-reproducible") {
  const auto a = build_lowerbound(small_params(), 6);
  const auto b = build_lowerbound(small_params(), 6);
  CHECK(test_oracle::same_matrix(a.instance.points, b.instance.points));
  CHECK(a.designated == b.designated);
  const auto c = build_lowerbound(small_params(), 7);
  CHECK_FALSE(test_oracle::same_matrix(a.instance.points, c.instance.points));
}

TEST_CASE("certifying the planted clustering reports zero displaced points") {
  const auto lb = build_lowerbound(small_params(), 8);
  Clustering planted;
  planted.labels = lb.instance.planted_labels;
  planted.centers = Matrix::Zero(4, 64);
  std::vector<std::int64_t> counts(4, 0);
  for (Index t = 0; t < lb.instance.n(); ++t) {
    const auto i = lb.instance.planted_labels[static_cast<std::size_t>(t)];
    planted.centers.row(i) += lb.instance.points.row(t);
    ++counts[i];
  }
  for (int i = 0; i < 4; ++i)
    planted.centers.row(i) /= static_cast<double>(counts[static_cast<std::size_t>(i)]);

  const auto cert = certify(lb, planted);
  CHECK_FALSE(cert.ok);
  CHECK(cert.designated_total == 4);
  CHECK(cert.designated_misclassified == 0);
  CHECK(cert.designated_misclassified_fraction == 0.0);
  // Construction diagnostics hold even when the clustering does not displace.
  CHECK(cert.min_designated_projection >= 0.5 * (1 - 1e-9));
  CHECK(cert.max_u_norm_dev <= cert.u_norm_bound);
  CHECK(cert.min_cross_pair_distance >= cert.cross_bound * (1 - 1e-9));
  CHECK(cert.min_collapse_shift > 0.2);
  CHECK(cert.delta_regime == "formal");
}

TEST_CASE("a clustering that displaces the designated points certifies") {
  const auto lb = build_lowerbound(small_params(), 9);
  Clustering flipped;
  flipped.labels = lb.instance.planted_labels;
  for (const Index t : lb.designated) {
    // Send each designated point to its pair's collapsed cluster.
    flipped.labels[static_cast<std::size_t>(t)] -= 1;
  }
  flipped.centers = Matrix::Zero(4, 64);
  std::vector<std::int64_t> counts(4, 0);
  for (Index t = 0; t < lb.instance.n(); ++t) {
    const auto i = flipped.labels[static_cast<std::size_t>(t)];
    flipped.centers.row(i) += lb.instance.points.row(t);
    ++counts[i];
  }
  for (int i = 0; i < 4; ++i)
    flipped.centers.row(i) /= static_cast<double>(counts[static_cast<std::size_t>(i)]);

  const auto cert = certify(lb, flipped);
  CHECK(cert.designated_misclassified == 4);
  CHECK(cert.designated_misclassified_fraction == 1.0);
  CHECK(cert.ok);
}

TEST_CASE("the full pipeline certificate runs end to end deterministically") {
  const auto lb = build_lowerbound(small_params(), 10);
  Clustering out;
  const auto cert = certify_with_lloyd(lb, {}, 0.9, &out);
  CHECK(cert.designated_total == 4);
  CHECK(cert.designated_misclassified >= 0);
  CHECK(cert.designated_misclassified <= 4);
  CHECK(out.labels.size() == 8000);
  const auto again = certify_with_lloyd(lb, {}, 0.9);
  CHECK(again.designated_misclassified == cert.designated_misclassified);
  CHECK(again.ok == cert.ok);
}
