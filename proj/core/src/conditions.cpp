#include "srgmm/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "srgmm/linalg.hpp"

namespace srgmm {

namespace {

constexpr double kPassSlack = 1e-9;

void validate_inputs(const Matrix& points,
                     const std::vector<std::uint32_t>& labels,
                     const Matrix& means, double sigma) {
  if (points.rows() < 1 || points.cols() < 1)
    throw InvalidInput("points must be a nonempty matrix");
  if (labels.size() != static_cast<std::size_t>(points.rows()))
    throw InvalidInput("labels size must match point count");
  if (means.cols() != points.cols())
    throw InvalidInput("means must share the points' dimension");
  if (means.rows() < 1) throw InvalidInput("need at least one mean");
  if (!(sigma > 0)) throw InvalidParams("sigma must be positive");
  if (!points.allFinite() || !means.allFinite())
    throw InvalidInput("points and means must be finite");
  for (const std::uint32_t lab : labels)
    if (lab >= static_cast<std::uint32_t>(means.rows()))
      throw InvalidInput("label out of range");
}

Matrix residuals(const Matrix& points, const std::vector<std::uint32_t>& labels,
                 const Matrix& means) {
  Matrix r(points.rows(), points.cols());
  for (Index t = 0; t < points.rows(); ++t)
    r.row(t) = points.row(t) - means.row(labels[static_cast<std::size_t>(t)]);
  return r;
}

void finalize(ConditionEntry& e) {
  e.pass = e.measured <= e.bound * (1.0 + kPassSlack);
}

void push_witness(ConditionEntry& e, std::int64_t idx) {
  if (e.witnesses.size() < 16) e.witnesses.push_back(idx);
}

std::vector<std::vector<Index>> rows_by_cluster(
    const std::vector<std::uint32_t>& labels, int k) {
  std::vector<std::vector<Index>> rows(static_cast<std::size_t>(k));
  for (std::size_t t = 0; t < labels.size(); ++t)
    rows[labels[t]].push_back(static_cast<Index>(t));
  return rows;
}

double log_n(const Matrix& points) {
  return std::log(static_cast<double>(points.rows()));
}

std::uint64_t fnv1a_bytes(const Vector& v) {
  std::uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
  const std::size_t n = static_cast<std::size_t>(v.size()) * sizeof(double);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

Vector canonical_sign(Vector v) {
  for (Index j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0) {
      if (v[j] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

}  // namespace

ConditionEntry check_length(const Matrix& points,
                            const std::vector<std::uint32_t>& labels,
                            const Matrix& means, double sigma) {
  validate_inputs(points, labels, means, sigma);
  ConditionEntry e;
  e.name = "point-radius";
  const double d = static_cast<double>(points.cols());
  e.bound = sigma * (std::sqrt(d) + 2.0 * std::sqrt(log_n(points)));
  const Eigen::VectorXd norms =
      residuals(points, labels, means).rowwise().norm();
  e.measured = norms.maxCoeff();
  finalize(e);
  for (Index t = 0; t < norms.size(); ++t)
    if (norms[t] > e.bound * (1.0 + kPassSlack)) push_witness(e, t);
  return e;
}

ConditionEntry check_fixed_direction(const Matrix& points,
                                     const std::vector<std::uint32_t>& labels,
                                     const Matrix& means, double sigma,
                                     const Vector& direction) {
  validate_inputs(points, labels, means, sigma);
  if (direction.size() != points.cols())
    throw InvalidInput("direction must have the points' dimension");
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw InvalidInput("direction must be a unit vector");
  ConditionEntry e;
  e.name = "fixed-direction-projection";
  e.bound = 3.0 * sigma * std::sqrt(log_n(points));
  const Eigen::VectorXd proj = residuals(points, labels, means) * direction;
  e.measured = proj.cwiseAbs().maxCoeff();
  e.witness_direction = direction;
  finalize(e);
  for (Index t = 0; t < proj.size(); ++t)
    if (std::abs(proj[t]) > e.bound * (1.0 + kPassSlack)) push_witness(e, t);
  return e;
}

ConditionEntry check_mean_direction(const Matrix& points,
                                    const std::vector<std::uint32_t>& labels,
                                    const Matrix& means, double sigma) {
  validate_inputs(points, labels, means, sigma);
  ConditionEntry e;
  e.name = "mean-direction-projection";
  e.bound = 3.0 * sigma * std::sqrt(log_n(points));
  e.measured = 0.0;
  const Matrix r = residuals(points, labels, means);
  const int k = static_cast<int>(means.rows());
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      Vector dir = (means.row(i) - means.row(j)).transpose();
      const double len = dir.norm();
      if (len <= 0) throw InvalidInput("planted means must be distinct");
      dir /= len;
      const Eigen::VectorXd proj = r * dir;
      const double worst = proj.cwiseAbs().maxCoeff();
      if (worst > e.measured) {
        e.measured = worst;
        e.witness_direction = dir;
      }
      for (Index t = 0; t < proj.size(); ++t)
        if (std::abs(proj[t]) > e.bound * (1.0 + kPassSlack))
          push_witness(e, t);
    }
  }
  finalize(e);
  return e;
}

ConditionEntry check_mean_drift(const Matrix& points,
                                const std::vector<std::uint32_t>& labels,
                                const Matrix& means, double sigma) {
  validate_inputs(points, labels, means, sigma);
  ConditionEntry e;
  e.name = "cluster-mean-drift";
  e.bound = 2.0 * sigma;
  const int k = static_cast<int>(means.rows());
  const double d = static_cast<double>(points.cols());
  const double min_size =
      4.0 * (d + std::log(static_cast<double>(k) *
                          static_cast<double>(points.rows())));
  const auto rows = rows_by_cluster(labels, k);
  e.measured = 0.0;
  int worst = -1;
  for (int i = 0; i < k; ++i) {
    const auto& idx = rows[static_cast<std::size_t>(i)];
    if (static_cast<double>(idx.size()) < min_size) {
      e.status = "precondition-unmet";
      push_witness(e, i);
    }
    if (idx.empty()) continue;
    Vector mean = Vector::Zero(points.cols());
    for (const Index t : idx) mean += points.row(t).transpose();
    mean /= static_cast<double>(idx.size());
    const double drift = (mean.transpose() - means.row(i)).norm();
    if (drift > e.measured) {
      e.measured = drift;
      worst = i;
    }
  }
  finalize(e);
  // The witness for a drift failure is the cluster that drifted (size
  // witnesses, when present, already precede it).
  if (!e.pass && worst >= 0 &&
      std::find(e.witnesses.begin(), e.witnesses.end(),
                static_cast<std::int64_t>(worst)) == e.witnesses.end())
    push_witness(e, worst);
  return e;
}

ConditionEntry check_variance(const Matrix& points,
                              const std::vector<std::uint32_t>& labels,
                              const Matrix& means, double sigma) {
  validate_inputs(points, labels, means, sigma);
  ConditionEntry e;
  e.name = "cluster-variance";
  e.bound = 4.0 * sigma * sigma;
  e.measured = 0.0;
  const int k = static_cast<int>(means.rows());
  const auto rows = rows_by_cluster(labels, k);
  for (int i = 0; i < k; ++i) {
    const auto& idx = rows[static_cast<std::size_t>(i)];
    if (idx.empty()) continue;
    Matrix r(static_cast<Index>(idx.size()), points.cols());
    for (std::size_t t = 0; t < idx.size(); ++t)
      r.row(static_cast<Index>(t)) = points.row(idx[t]) - means.row(i);
    const double top = spectral_norm(r);
    const double dir_var = top * top / static_cast<double>(idx.size());
    if (dir_var > e.measured) e.measured = dir_var;
  }
  finalize(e);
  return e;
}

ConditionEntry check_subset_mean(const Matrix& points,
                                 const std::vector<std::uint32_t>& labels,
                                 const Matrix& means, double sigma) {
  validate_inputs(points, labels, means, sigma);
  ConditionEntry e;
  e.name = "subset-mean-drift";
  e.bound = 1.0;
  e.measured = 0.0;
  // For |S| >= (1 - eps) N_i the subset mean obeys
  //   ||mean_S - mu_i|| <= ||R_i|| / sqrt((1 - eps) N_i),
  // so the worst ratio against (4 + 2/sqrt(1-eps)) sigma over eps < 1/2 is
  // attained at eps -> 1/2, giving ||R_i|| / (sqrt(N_i) (2 + 2 sqrt(2)) sigma).
  const int k = static_cast<int>(means.rows());
  const auto rows = rows_by_cluster(labels, k);
  const double denom_factor = (2.0 + 2.0 * std::sqrt(2.0)) * sigma;
  for (int i = 0; i < k; ++i) {
    const auto& idx = rows[static_cast<std::size_t>(i)];
    if (idx.empty()) continue;
    Matrix r(static_cast<Index>(idx.size()), points.cols());
    for (std::size_t t = 0; t < idx.size(); ++t)
      r.row(static_cast<Index>(t)) = points.row(idx[t]) - means.row(i);
    const double ratio =
        spectral_norm(r) /
        (std::sqrt(static_cast<double>(idx.size())) * denom_factor);
    if (ratio > e.measured) e.measured = ratio;
  }
  finalize(e);
  return e;
}

ConditionEntry check_spectral(const Matrix& points,
                              const std::vector<std::uint32_t>& labels,
                              const Matrix& means, double sigma) {
  validate_inputs(points, labels, means, sigma);
  ConditionEntry e;
  e.name = "data-spectral-norm";
  e.bound = 4.0 * sigma * std::sqrt(static_cast<double>(points.rows()));
  const int k = static_cast<int>(means.rows());
  Matrix emp = Matrix::Zero(k, points.cols());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  for (Index t = 0; t < points.rows(); ++t) {
    emp.row(labels[static_cast<std::size_t>(t)]) += points.row(t);
    ++counts[labels[static_cast<std::size_t>(t)]];
  }
  for (int i = 0; i < k; ++i)
    if (counts[static_cast<std::size_t>(i)] > 0)
      emp.row(i) /= static_cast<double>(counts[static_cast<std::size_t>(i)]);
  e.measured = spectral_norm(residuals(points, labels, emp));
  finalize(e);
  return e;
}

std::int64_t bad_direction_count(const Matrix& points,
                                 const std::vector<std::uint32_t>& labels,
                                 const Matrix& means, double sigma,
                                 double lambda, const Vector& direction) {
  validate_inputs(points, labels, means, sigma);
  if (!(lambda > 0)) throw InvalidParams("lambda must be positive");
  if (direction.size() != points.cols())
    throw InvalidInput("direction must have the points' dimension");
  const Eigen::VectorXd proj = residuals(points, labels, means) * direction;
  const double thresh = lambda * sigma;
  std::int64_t count = 0;
  for (Index t = 0; t < proj.size(); ++t)
    if (std::abs(proj[t]) >= thresh) ++count;
  return count;
}

ConditionEntry search_bad_directions(const Matrix& points,
                                     const std::vector<std::uint32_t>& labels,
                                     const Matrix& means, double sigma,
                                     double lambda, const SeedTree& stream) {
  validate_inputs(points, labels, means, sigma);
  if (!(lambda > 0)) throw InvalidParams("lambda must be positive");
  ConditionEntry e;
  e.name = "bad-directions";
  const double d = static_cast<double>(points.cols());
  const double ln_n = log_n(points);
  const double radius = std::sqrt(d) + 2.0 * std::sqrt(ln_n);
  e.bound = 512.0 * d / (lambda * lambda) *
            std::max(1.0, std::log(3.0 * radius / lambda));
  if (!(lambda > 100.0 * std::sqrt(ln_n))) e.status = "outside-lemma-regime";

  const Matrix r = residuals(points, labels, means);
  const double thresh = lambda * sigma;
  // No unit direction can reach the threshold when even the longest centered
  // point falls short of it.
  if (thresh > r.rowwise().norm().maxCoeff()) {
    e.measured = 0.0;
    finalize(e);
    return e;
  }

  struct Candidate {
    std::int64_t count;
    std::uint64_t hash;
    Vector v;
  };
  auto better = [](const Candidate& a, const Candidate& b) {
    return a.count > b.count || (a.count == b.count && a.hash < b.hash);
  };
  auto eval = [&](const Vector& dir) {
    Candidate c;
    c.v = canonical_sign(dir);
    c.hash = fnv1a_bytes(c.v);
    const Eigen::VectorXd proj = r * c.v;
    c.count = 0;
    for (Index t = 0; t < proj.size(); ++t)
      if (std::abs(proj[t]) >= thresh) ++c.count;
    return c;
  };

  std::vector<Candidate> pool;
  const int di = static_cast<int>(points.cols());
  const int nsing = static_cast<int>(std::min<Index>(
      std::min<Index>(2 * means.rows(), points.cols()),
      std::min(points.rows(), points.cols())));
  if (nsing >= 1) {
    const LowRankProjection proj = topk_svd(r, nsing);
    for (int j = 0; j < nsing; ++j)
      pool.push_back(eval(proj.basis.col(j)));
  }
  const SeedTree dirs = stream.child("random");
  for (std::uint64_t i = 0; i < 4096; ++i)
    pool.push_back(eval(sample_unit_direction(di, dirs.child("v", i))));

  std::stable_sort(pool.begin(), pool.end(), better);
  Candidate best = pool.front();

  // Smoothed-ascent refinement from the strongest starting candidates.
  const double width = 0.05 * thresh;
  const int restarts = static_cast<int>(std::min<std::size_t>(64, pool.size()));
  for (int s = 0; s < restarts; ++s) {
    Vector v = pool[static_cast<std::size_t>(s)].v;
    Candidate local = pool[static_cast<std::size_t>(s)];
    int stale = 0;
    for (int step = 0; step < 100 && stale < 15; ++step) {
      const Eigen::VectorXd proj = r * v;
      Eigen::VectorXd coef(proj.size());
      for (Index t = 0; t < proj.size(); ++t) {
        const double z = (std::abs(proj[t]) - thresh) / width;
        const double sig = 1.0 / (1.0 + std::exp(-z));
        const double sgn = proj[t] > 0 ? 1.0 : (proj[t] < 0 ? -1.0 : 0.0);
        coef[t] = sig * (1.0 - sig) * sgn / width;
      }
      Vector g = r.transpose() * coef;
      const double gn = g.norm();
      if (gn < 1e-300) break;
      v = (v + 0.1 * g / gn).normalized();
      const Candidate c = eval(v);
      if (better(c, local)) {
        local = c;
        stale = 0;
      } else {
        ++stale;
      }
    }
    if (better(local, best)) best = local;
  }

  e.measured = static_cast<double>(best.count);
  e.witness_direction = best.v;
  const Eigen::VectorXd proj = r * best.v;
  for (Index t = 0; t < proj.size(); ++t)
    if (std::abs(proj[t]) >= thresh) push_witness(e, t);
  finalize(e);
  return e;
}

ConditionReport run_all_conditions(const Instance& instance, double lambda) {
  instance.validate();
  if (!(lambda > 0)) throw InvalidParams("lambda must be positive");
  const Matrix& pts = instance.points;
  const std::vector<std::uint32_t>& labels = instance.planted_labels;
  const Matrix& means = instance.params.means;
  const double sigma = instance.params.sigma;
  const SeedTree stream =
      SeedTree::root(instance.provenance.seed).child("conditions");

  ConditionReport rep;
  rep.entries.push_back(check_length(pts, labels, means, sigma));
  rep.entries.push_back(check_fixed_direction(
      pts, labels, means, sigma,
      sample_unit_direction(static_cast<int>(pts.cols()),
                            stream.child("fixed-direction"))));
  rep.entries.push_back(check_mean_direction(pts, labels, means, sigma));
  rep.entries.push_back(check_mean_drift(pts, labels, means, sigma));
  rep.entries.push_back(check_variance(pts, labels, means, sigma));
  rep.entries.push_back(check_subset_mean(pts, labels, means, sigma));
  rep.entries.push_back(check_spectral(pts, labels, means, sigma));
  rep.entries.push_back(search_bad_directions(pts, labels, means, sigma,
                                              lambda, stream.child("bad")));
  rep.verdict = true;
  for (const ConditionEntry& e : rep.entries)
    if (e.status == "ok" && !e.pass) rep.verdict = false;
  return rep;
}

}  // namespace srgmm
