#include "srgmm/types.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

namespace srgmm {

namespace {
constexpr double kCovSlack = 1e-9;  // absolute slack on the spectral-norm cap
}

CovarianceSpec CovarianceSpec::spherical(double sigma_i) {
  CovarianceSpec c;
  c.kind = Kind::Spherical;
  c.spherical_sigma = sigma_i;
  return c;
}

CovarianceSpec CovarianceSpec::diag(Vector variances) {
  CovarianceSpec c;
  c.kind = Kind::Diagonal;
  c.diagonal = std::move(variances);
  return c;
}

CovarianceSpec CovarianceSpec::dense(Matrix cov) {
  CovarianceSpec c;
  c.kind = Kind::Full;
  c.full = std::move(cov);
  return c;
}

double CovarianceSpec::bound() const {
  switch (kind) {
    case Kind::Spherical:
      return spherical_sigma * spherical_sigma;
    case Kind::Diagonal:
      return diagonal.size() == 0 ? 0.0 : diagonal.maxCoeff();
    case Kind::Full: {
      if (full.rows() == 0) return 0.0;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  return 0.0;
}

void CovarianceSpec::validate(Index d, double sigma) const {
  switch (kind) {
    case Kind::Spherical:
      if (!(spherical_sigma > 0.0))
        throw InvalidParams("spherical covariance needs sigma_i > 0");
      break;
    case Kind::Diagonal:
      if (diagonal.size() != d)
        throw InvalidParams("diagonal covariance has wrong dimension");
      if ((diagonal.array() <= 0.0).any())
        throw InvalidParams("diagonal covariance entries must be positive");
      break;
    case Kind::Full: {
      if (full.rows() != d || full.cols() != d)
        throw InvalidParams("full covariance has wrong dimensions");
      if (!full.isApprox(full.transpose(), 1e-12))
        throw InvalidParams("full covariance must be symmetric");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full);
      if (es.eigenvalues().minCoeff() < -1e-12)
        throw InvalidParams("full covariance must be positive semidefinite");
      break;
    }
  }
  if (bound() > sigma * sigma + kCovSlack) {
    std::ostringstream os;
    os << "covariance spectral norm " << bound() << " exceeds sigma^2 = "
       << sigma * sigma;
    throw InvalidParams(os.str());
  }
}

MixtureParams MixtureParams::create(Matrix means, double sigma,
                                    std::vector<CovarianceSpec> covariances,
                                    std::vector<std::int64_t> cluster_sizes) {
  const int k = static_cast<int>(means.rows());
  const Index d = means.cols();
  if (k < 1) throw InvalidParams("need at least one component");
  if (d < 1) throw InvalidParams("need dimension >= 1");
  if (!(sigma > 0.0)) throw InvalidParams("sigma must be positive");
  if (!means.allFinite()) throw InvalidParams("means must be finite");
  if (static_cast<int>(covariances.size()) != k)
    throw InvalidParams("need one covariance per component");
  if (static_cast<int>(cluster_sizes.size()) != k)
    throw InvalidParams("need one cluster size per component");

  for (int i = 0; i < k; ++i) {
    covariances[i].validate(d, sigma);
    if (cluster_sizes[i] <= 0)
      throw InvalidParams("cluster sizes must be positive");
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if ((means.row(i) - means.row(j)).norm() <= 0.0)
        throw InvalidParams("component means must be pairwise distinct");
    }
  }

  MixtureParams p;
  p.k = k;
  p.d = d;
  p.means = std::move(means);
  p.sigma = sigma;
  p.covariances = std::move(covariances);
  p.cluster_sizes = std::move(cluster_sizes);
  return p;
}

MixtureParams MixtureParams::create_spherical(
    Matrix means, double sigma, std::vector<std::int64_t> cluster_sizes) {
  std::vector<CovarianceSpec> covs(means.rows(),
                                   CovarianceSpec::spherical(sigma));
  return create(std::move(means), sigma, std::move(covs),
                std::move(cluster_sizes));
}

std::int64_t MixtureParams::total_points() const {
  std::int64_t n = 0;
  for (auto s : cluster_sizes) n += s;
  return n;
}

double MixtureParams::w_min() const {
  const double n = static_cast<double>(total_points());
  std::int64_t m = cluster_sizes.empty() ? 0 : cluster_sizes[0];
  for (auto s : cluster_sizes) m = std::min(m, s);
  return static_cast<double>(m) / n;
}

double separation(const MixtureParams& params) {
  if (params.k < 2)
    throw InvalidParams("separation needs at least two components");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < params.k; ++i)
    for (int j = i + 1; j < params.k; ++j)
      best = std::min(best,
                      (params.means.row(i) - params.means.row(j)).norm());
  return best / params.sigma;
}

void Instance::validate() const {
  const std::int64_t n = points.rows();
  if (points.cols() != params.d)
    throw InvalidInput("points dimension disagrees with params");
  if (static_cast<std::int64_t>(planted_labels.size()) != n)
    throw InvalidInput("one planted label per point required");
  if (n != params.total_points())
    throw InvalidInput("point count disagrees with cluster sizes");
  std::vector<std::int64_t> counts(params.k, 0);
  for (auto l : planted_labels) {
    if (l >= static_cast<std::uint32_t>(params.k))
      throw InvalidInput("planted label out of range");
    ++counts[l];
  }
  for (int i = 0; i < params.k; ++i)
    if (counts[i] != params.cluster_sizes[i])
      throw InvalidInput("planted label counts disagree with cluster sizes");
  if (pre_perturbation_points &&
      (pre_perturbation_points->rows() != n ||
       pre_perturbation_points->cols() != params.d))
    throw InvalidInput("pre-perturbation points have wrong shape");
}

MonotoneCertificate verify_monotone_certificate(const Instance& instance,
                                                double rel_tol) {
  MonotoneCertificate cert;
  if (!instance.pre_perturbation_points)
    throw InvalidInput("monotone certificate needs pre-perturbation points");
  const Matrix& x = instance.points;
  const Matrix& y = *instance.pre_perturbation_points;
  const Matrix& means = instance.params.means;

  for (std::int64_t t = 0; t < x.rows(); ++t) {
    const auto mu = means.row(instance.planted_labels[t]);
    const Eigen::RowVectorXd xb = x.row(t) - mu;
    const Eigen::RowVectorXd yb = y.row(t) - mu;
    const double ynorm = yb.cwiseAbs().maxCoeff();
    bool bad = false;
    if (ynorm == 0.0) {
      bad = xb.cwiseAbs().maxCoeff() > 0.0;
    } else {
      Index jmax = 0;
      yb.cwiseAbs().maxCoeff(&jmax);
      const double lambda = xb[jmax] / yb[jmax];
      if (lambda < -rel_tol || lambda > 1.0 + rel_tol) {
        bad = true;
      } else {
        const double tol = rel_tol * ynorm;
        bad = ((xb - lambda * yb).cwiseAbs().array() > tol).any();
      }
    }
    if (bad) {
      cert.ok = false;
      if (cert.violations.size() < 16) cert.violations.push_back(t);
    }
  }
  return cert;
}

}  // namespace srgmm
