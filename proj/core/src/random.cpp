#include "srgmm/random.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>

namespace srgmm {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kKeyTweak = 0xDA942042E4DD58B5ull;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

SeedTree::SeedTree(std::uint64_t root_seed, std::uint64_t key, std::string path)
    : root_seed_(root_seed), key_(key), path_(std::move(path)) {}

SeedTree SeedTree::root(std::uint64_t seed) {
  return SeedTree(seed, mix64(seed ^ kKeyTweak), "");
}

SeedTree SeedTree::child(std::string_view label) const {
  std::string p = path_.empty() ? std::string(label)
                                : path_ + "/" + std::string(label);
  return SeedTree(root_seed_, mix64(key_ ^ (fnv1a(label) + kGolden)),
                  std::move(p));
}

SeedTree SeedTree::child(std::string_view label, std::uint64_t index) const {
  SeedTree base = child(label);
  base.key_ = mix64(base.key_ ^ ((index + 1) * kGolden));
  base.path_ += "/" + std::to_string(index);
  return base;
}

std::uint64_t SeedTree::bits(std::uint64_t counter) const {
  // Two mixing rounds decouple (key, counter) pairs across streams.
  return mix64(mix64(counter * kGolden + key_) ^ (key_ * kKeyTweak));
}

double SeedTree::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double SeedTree::uniform_open(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double SeedTree::normal(std::uint64_t counter) const {
  const std::uint64_t pair = counter >> 1;
  const double u1 = uniform_open(2 * pair);
  const double u2 = uniform(2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return (counter & 1) ? r * std::sin(theta) : r * std::cos(theta);
}

Matrix sample_gaussian(const Vector& mean, const CovarianceSpec& cov,
                       double sigma, std::int64_t count,
                       const SeedTree& stream) {
  const Index d = mean.size();
  if (d < 1) throw InvalidParams("mean must have dimension >= 1");
  if (!(sigma > 0.0)) throw InvalidParams("sigma must be positive");
  if (count < 0) throw InvalidParams("count must be nonnegative");
  cov.validate(d, sigma);

  Matrix out(count, d);
  if (count == 0) return out;

  switch (cov.kind) {
    case CovarianceSpec::Kind::Spherical: {
      const double s = cov.spherical_sigma;
      for (std::int64_t t = 0; t < count; ++t)
        for (Index j = 0; j < d; ++j)
          out(t, j) = mean[j] + s * stream.normal(static_cast<std::uint64_t>(t) * d + j);
      break;
    }
    case CovarianceSpec::Kind::Diagonal: {
      const Vector sd = cov.diagonal.cwiseSqrt();
      for (std::int64_t t = 0; t < count; ++t)
        for (Index j = 0; j < d; ++j)
          out(t, j) = mean[j] + sd[j] * stream.normal(static_cast<std::uint64_t>(t) * d + j);
      break;
    }
    case CovarianceSpec::Kind::Full: {
      Eigen::LLT<Eigen::MatrixXd> llt(
          cov.full + 1e-14 * Eigen::MatrixXd::Identity(d, d));
      if (llt.info() != Eigen::Success)
        throw InvalidParams("full covariance is not positive semidefinite");
      const Eigen::MatrixXd L = llt.matrixL();
      Vector z(d);
      for (std::int64_t t = 0; t < count; ++t) {
        for (Index j = 0; j < d; ++j)
          z[j] = stream.normal(static_cast<std::uint64_t>(t) * d + j);
        out.row(t) = (mean + L * z).transpose();
      }
      break;
    }
  }
  return out;
}

Vector sample_unit_direction(Index d, const SeedTree& stream) {
  if (d < 1) throw InvalidParams("direction needs dimension >= 1");
  Vector v(d);
  std::uint64_t offset = 0;
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (Index j = 0; j < d; ++j) v[j] = stream.normal(offset + j);
    const double n = v.norm();
    if (n > 1e-150) return v / n;
    offset += static_cast<std::uint64_t>(d);
  }
  throw ConvergenceError("could not draw a nonzero direction", 0.0);
}

std::vector<std::int64_t> sizes_from_weights(const std::vector<double>& weights,
                                             std::int64_t total,
                                             const SeedTree& stream) {
  const std::size_t k = weights.size();
  if (k == 0) throw InvalidParams("need at least one weight");
  if (total < static_cast<std::int64_t>(k))
    throw InvalidParams("need at least one point per component");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw InvalidParams("weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidParams("weights must sum to 1");

  std::vector<double> cdf(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  cdf[k - 1] = 1.0;

  std::vector<std::int64_t> counts(k, 0);
  for (std::int64_t t = 0; t < total; ++t) {
    const double u = stream.uniform(static_cast<std::uint64_t>(t));
    std::size_t i = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    if (i >= k) i = k - 1;
    ++counts[i];
  }
  for (std::size_t i = 0; i < k; ++i)
    if (counts[i] == 0)
      throw InvalidParams("multinomial left component " + std::to_string(i) +
                          " empty; use a different seed or larger N");
  return counts;
}

std::vector<std::int64_t> shuffle_indices(std::int64_t n,
                                          const SeedTree& stream) {
  std::vector<std::int64_t> idx(n);
  for (std::int64_t i = 0; i < n; ++i) idx[i] = i;
  for (std::int64_t i = n - 1; i > 0; --i) {
    const std::uint64_t r =
        stream.bits(static_cast<std::uint64_t>(i)) % static_cast<std::uint64_t>(i + 1);
    std::swap(idx[i], idx[static_cast<std::int64_t>(r)]);
  }
  return idx;
}

}  // namespace srgmm
