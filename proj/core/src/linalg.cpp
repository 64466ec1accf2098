#include "srgmm/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "srgmm/random.hpp"

namespace srgmm {

namespace {

// Below this size the Gram-matrix eigendecomposition is exact, fast, and
// deterministic; above it we switch to randomized subspace iteration.
constexpr Index kExactLimit = 768;
constexpr std::uint64_t kInternalSeed = 0x5eed5eed5eed5eedull;

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

Eigen::MatrixXd fixed_gaussian(Index rows, Index cols) {
  const SeedTree s = SeedTree::root(kInternalSeed).child("range");
  Eigen::MatrixXd g(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      g(i, j) = s.normal(static_cast<std::uint64_t>(i) * cols + j);
  return g;
}

// Exact top-k right-singular pairs through the smaller Gram matrix.
LowRankProjection exact_topk(const Matrix& a, int k) {
  const Index n = a.rows(), d = a.cols();
  LowRankProjection out;
  out.basis.resize(d, k);
  out.singular_values.resize(k);

  if (d <= n) {
    Eigen::MatrixXd gram = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    for (int i = 0; i < k; ++i) {
      const Index src = d - 1 - i;  // eigenvalues come back ascending
      out.basis.col(i) = es.eigenvectors().col(src);
      out.singular_values[i] = std::sqrt(std::max(0.0, es.eigenvalues()[src]));
    }
    return out;
  }

  // Wide case: eigenvectors of A A^T, mapped to right-singular vectors.
  Eigen::MatrixXd gram = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  int filled = 0;
  for (int i = 0; i < k; ++i) {
    const Index src = n - 1 - i;
    const double sv = std::sqrt(std::max(0.0, es.eigenvalues()[src]));
    out.singular_values[i] = sv;
    if (sv > 1e-12 * std::sqrt(std::max(0.0, es.eigenvalues()[n - 1]) + 1.0)) {
      out.basis.col(i) = (a.transpose() * es.eigenvectors().col(src)) / sv;
      ++filled;
    }
  }
  if (filled < k) {
    // Rank-deficient: complete the basis with an orthonormal complement.
    Eigen::MatrixXd seed(d, k);
    seed.setZero();
    seed.leftCols(filled) = out.basis.leftCols(filled);
    const Eigen::MatrixXd fill = fixed_gaussian(d, k - filled);
    seed.rightCols(k - filled) = fill;
    out.basis = orthonormalize(seed);
  }
  return out;
}

}  // namespace

LowRankProjection topk_svd(const Matrix& a, int k, double tol, int max_iters) {
  const Index n = a.rows(), d = a.cols();
  const Index mindim = std::min(n, d);
  if (k < 1 || k > mindim)
    throw InvalidParams("topk_svd needs 1 <= k <= min(rows, cols)");
  if (!(tol >= 0.0)) throw InvalidParams("tol must be nonnegative");
  if (!a.allFinite()) throw InvalidInput("matrix entries must be finite");

  if (mindim <= kExactLimit) return exact_topk(a, k);

  // Randomized subspace iteration with Rayleigh-Ritz extraction.
  const Index l = std::min<Index>(k + 8, mindim);
  Eigen::MatrixXd q = orthonormalize(a * fixed_gaussian(d, l));
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(l);
  double change = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::MatrixXd z = orthonormalize(a.transpose() * q);
    Eigen::MatrixXd y = a * z;
    // Ritz values from the small factor R of Y = QR.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd r =
        qr.matrixQR().topRows(l).template triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXd> small(r);
    const Eigen::VectorXd sv = small.singularValues();
    const double scale = std::max(sv[0], 1e-300);
    change = (sv.head(k) - prev.head(k)).cwiseAbs().maxCoeff() / scale;
    prev = sv;
    q = qr.householderQ() * Eigen::MatrixXd::Identity(n, l);
    if (it >= 1 && change <= std::max(tol * 1e-2, 1e-14)) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("topk_svd did not stabilize", change);

  // Final extraction: B = Q^T A, thin SVD of the l x d factor.
  Eigen::MatrixXd b = q.transpose() * a;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
  LowRankProjection out;
  out.basis = svd.matrixV().leftCols(k);
  out.singular_values = svd.singularValues().head(k);
  return out;
}

double spectral_norm(const Matrix& a, double tol, int max_iters) {
  const Index n = a.rows(), d = a.cols();
  if (n == 0 || d == 0) return 0.0;
  if (!(tol > 0.0)) throw InvalidParams("tol must be positive");
  if (!a.allFinite()) throw InvalidInput("matrix entries must be finite");
  if (a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  const Index mindim = std::min(n, d);
  if (mindim <= kExactLimit) {
    Eigen::MatrixXd gram = (d <= n) ? Eigen::MatrixXd(a.transpose() * a)
                                    : Eigen::MatrixXd(a * a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  // Block power iteration; the Ritz estimate increases monotonically.
  const Index l = std::min<Index>(8, mindim);
  Eigen::MatrixXd v = orthonormalize(fixed_gaussian(d, l));
  double est = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::MatrixXd w = a * v;  // n x l
    Eigen::MatrixXd small = w.transpose() * w;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
    const double next = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    const bool done = it >= 2 && next - est <= tol * 0.1 * std::max(next, 1e-300);
    est = next;
    if (done) return est;
    v = orthonormalize(a.transpose() * w);
  }
  throw ConvergenceError("spectral_norm power iteration did not converge", est);
}

}  // namespace srgmm
