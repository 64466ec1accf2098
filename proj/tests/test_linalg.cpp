#include <doctest.h>

#include <cmath>

#include "srgmm/linalg.hpp"
#include "srgmm/random.hpp"
#include "test_util.hpp"

using namespace srgmm;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  const SeedTree s = SeedTree::root(seed).child("mat");
  Matrix a(rows, cols);
  std::uint64_t c = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = s.normal(c++);
  return a;
}

// Matrix with a planted spectrum: rows*cols Gaussian factors rescaled so the
// singular values are known up to orthogonal rotation.
Matrix planted_spectrum(Index n, Index d, const Vector& spectrum,
                        std::uint64_t seed) {
  Matrix left = random_matrix(n, spectrum.size(), seed);
  Matrix right = random_matrix(d, spectrum.size(), seed + 1);
  // Orthonormalize the factors through dense QR (oracle-side, independent).
  Eigen::HouseholderQR<Eigen::MatrixXd> ql((Eigen::MatrixXd(left)));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr((Eigen::MatrixXd(right)));
  Eigen::MatrixXd qleft =
      ql.householderQ() * Eigen::MatrixXd::Identity(n, spectrum.size());
  Eigen::MatrixXd qright =
      qr.householderQ() * Eigen::MatrixXd::Identity(d, spectrum.size());
  return Matrix(qleft * spectrum.asDiagonal() * qright.transpose());
}

}  // namespace

TEST_CASE("exact top-k agrees with the dense decomposition oracle") {
  const Matrix a = random_matrix(200, 50, 42);
  const auto proj = topk_svd(a, 10);
  REQUIRE(proj.basis.rows() == 50);
  REQUIRE(proj.basis.cols() == 10);
  REQUIRE(proj.singular_values.size() == 10);

  const Eigen::VectorXd oracle = test_oracle::dense_singular_values(a);
  for (int i = 0; i < 10; ++i) {
    CHECK(std::fabs(proj.singular_values(i) - oracle(i)) <=
          1e-6 * oracle(0));
    if (i > 0) CHECK(proj.singular_values(i) <= proj.singular_values(i - 1) + 1e-12);
  }

  // Orthonormal basis.
  const Matrix gram = proj.basis.transpose() * proj.basis;
  CHECK((gram - Matrix::Identity(10, 10)).norm() < 1e-10);

  // Projection residual no worse than the optimal rank-10 approximation.
  const Matrix residual = a - a * proj.basis * proj.basis.transpose();
  const double res_norm = test_oracle::dense_spectral_norm(residual);
  CHECK(res_norm <= oracle(10) * (1.0 + 1e-6));
}

TEST_CASE("wide matrices are handled through the transposed gram") {
  const Matrix a = random_matrix(50, 200, 43);
  const auto proj = topk_svd(a, 8);
  REQUIRE(proj.basis.rows() == 200);
  const Eigen::VectorXd oracle = test_oracle::dense_singular_values(a);
  for (int i = 0; i < 8; ++i)
    CHECK(std::fabs(proj.singular_values(i) - oracle(i)) <= 1e-6 * oracle(0));
  const Matrix gram = proj.basis.transpose() * proj.basis;
  CHECK((gram - Matrix::Identity(8, 8)).norm() < 1e-10);
  const Matrix residual = a - a * proj.basis * proj.basis.transpose();
  CHECK(test_oracle::dense_spectral_norm(residual) <= oracle(8) * (1.0 + 1e-6));
}

TEST_CASE("rank-deficient input yields zero tail singular values") {
  // Rank-2 matrix from two outer products.
  Matrix u = random_matrix(60, 2, 44);
  Matrix v = random_matrix(30, 2, 45);
  Matrix a = u * v.transpose();
  const auto proj = topk_svd(a, 4);
  const Eigen::VectorXd oracle = test_oracle::dense_singular_values(a);
  CHECK(std::fabs(proj.singular_values(0) - oracle(0)) <= 1e-8 * oracle(0));
  CHECK(std::fabs(proj.singular_values(1) - oracle(1)) <= 1e-8 * oracle(0));
  // Singular values that are exactly zero come back as sqrt(machine-eps)
  // noise relative to the leading value, so allow that floor.
  CHECK(proj.singular_values(2) <= 1e-6 * oracle(0));
  CHECK(proj.singular_values(3) <= 1e-6 * oracle(0));
  // Basis still orthonormal even where the spectrum vanished.
  const Matrix gram = proj.basis.transpose() * proj.basis;
  CHECK((gram - Matrix::Identity(4, 4)).norm() < 1e-9);
  // Residual is numerically zero: the matrix has rank 2 < 4.
  const Matrix residual = a - a * proj.basis * proj.basis.transpose();
  CHECK(test_oracle::dense_spectral_norm(residual) <= 1e-8 * oracle(0));
}

TEST_CASE("spectral norm matches the dense oracle on small matrices") {
  const Matrix a = random_matrix(300, 80, 46);
  const double ours = spectral_norm(a);
  const double oracle = test_oracle::dense_spectral_norm(a);
  CHECK(std::fabs(ours - oracle) <= 1e-6 * oracle);

  CHECK(spectral_norm(Matrix::Zero(5, 3)) == 0.0);
  CHECK(spectral_norm(Matrix(0, 0)) == 0.0);
}

TEST_CASE("parameter validation") {
  const Matrix a = random_matrix(20, 10, 47);
  CHECK_THROWS_AS(topk_svd(a, 0), InvalidParams);
  CHECK_THROWS_AS(topk_svd(a, 11), InvalidParams);
  CHECK_NOTHROW(topk_svd(a, 10));
}

TEST_SUITE("slow") {

TEST_CASE("iterative top-k matches the dense oracle beyond the exact cutoff") {
  // 900x900 forces the randomized subspace path (dense side stays feasible
  // for the oracle).
  Vector spectrum(12);
  for (int i = 0; i < 12; ++i) spectrum(i) = 100.0 / (1 << i);
  Matrix a = planted_spectrum(900, 900, spectrum, 48);
  // Add small noise so the tail is not exactly degenerate.
  a += 1e-6 * random_matrix(900, 900, 49);

  const auto proj = topk_svd(a, 6);
  const Eigen::VectorXd oracle = test_oracle::dense_singular_values(a);
  for (int i = 0; i < 6; ++i)
    CHECK(std::fabs(proj.singular_values(i) - oracle(i)) <= 1e-5 * oracle(0));
  const Matrix gram = proj.basis.transpose() * proj.basis;
  CHECK((gram - Matrix::Identity(6, 6)).norm() < 1e-9);
  const Matrix residual = a - a * proj.basis * proj.basis.transpose();
  CHECK(test_oracle::dense_spectral_norm(residual) <= oracle(6) * (1.0 + 1e-5));
}

TEST_CASE("iterative spectral norm matches the dense oracle") {
  Vector spectrum(10);
  for (int i = 0; i < 10; ++i) spectrum(i) = 50.0 * std::pow(0.6, i);
  Matrix a = planted_spectrum(900, 820, spectrum, 50);
  a += 1e-4 * random_matrix(900, 820, 51);
  const double ours = spectral_norm(a, 1e-7);
  const double oracle = test_oracle::dense_spectral_norm(a);
  CHECK(std::fabs(ours - oracle) <= 1e-5 * oracle);
}

}  // TEST_SUITE("slow")
