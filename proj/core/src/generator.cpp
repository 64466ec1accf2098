#include "srgmm/generator.hpp"

#include <Eigen/QR>
#include <cmath>

namespace srgmm {

Matrix place_separated_means(int k, Index d, double delta, double sigma,
                             const SeedTree& stream, MeanPlacement placement) {
  if (k < 1) throw InvalidParams("need k >= 1");
  if (d < 1) throw InvalidParams("need d >= 1");
  if (!(sigma > 0.0)) throw InvalidParams("sigma must be positive");
  if (k == 1) return Matrix::Zero(1, d);
  if (!(delta > 0.0)) throw InvalidParams("need delta > 0 for k >= 2");

  if (placement == MeanPlacement::Orthogonal) {
    if (k > d)
      throw InvalidParams("orthogonal placement needs k <= d; use random placement");
    Matrix g(d, k);
    const SeedTree s = stream.child("place");
    for (Index i = 0; i < d; ++i)
      for (int j = 0; j < k; ++j)
        g(i, j) = s.normal(static_cast<std::uint64_t>(i) * k + j);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q =
        qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
    const double scale = delta * sigma / std::sqrt(2.0);
    Matrix means(k, d);
    for (int j = 0; j < k; ++j) means.row(j) = scale * q.col(j).transpose();
    return means;
  }

  // Random placement: unit directions, rescaled so min pairwise = delta*sigma.
  Matrix dirs(k, d);
  for (int j = 0; j < k; ++j)
    dirs.row(j) =
        sample_unit_direction(d, stream.child("place", static_cast<std::uint64_t>(j)))
            .transpose();
  double dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      dmin = std::min(dmin, (dirs.row(i) - dirs.row(j)).norm());
  if (!(dmin > 1e-9))
    throw InvalidParams("random placement drew colliding directions");
  return (delta * sigma / dmin) * dirs;
}

MixtureParams resolve_recipe(const GeneratorRecipe& recipe,
                             const SeedTree& stream) {
  Matrix means;
  if (recipe.means) {
    means = *recipe.means;
    if (means.rows() != recipe.k || means.cols() != recipe.d)
      throw InvalidParams("explicit means have wrong shape");
  } else {
    means = place_separated_means(recipe.k, recipe.d, recipe.delta,
                                  recipe.sigma, stream, recipe.placement);
  }

  std::vector<std::int64_t> sizes;
  if (recipe.sizes) {
    sizes = *recipe.sizes;
  } else if (recipe.weights) {
    sizes = sizes_from_weights(*recipe.weights, recipe.total,
                               stream.child("sizes"));
  } else {
    throw InvalidParams("recipe needs sizes or weights");
  }

  std::vector<CovarianceSpec> covs = recipe.covariances;
  if (covs.empty())
    covs.assign(recipe.k, CovarianceSpec::spherical(recipe.sigma));

  return MixtureParams::create(std::move(means), recipe.sigma, std::move(covs),
                               std::move(sizes));
}

Instance generate_instance(const MixtureParams& params,
                           const AdversarySpec& adversary, std::uint64_t seed) {
  const SeedTree root = SeedTree::root(seed);
  const std::int64_t n = params.total_points();

  Instance pre;
  pre.params = params;
  pre.points.resize(n, params.d);
  pre.planted_labels.resize(n);
  pre.provenance.seed = seed;
  pre.provenance.adversary = AdversarySpec::identity().to_json_text();

  std::int64_t offset = 0;
  for (int i = 0; i < params.k; ++i) {
    const std::int64_t ni = params.cluster_sizes[i];
    pre.points.middleRows(offset, ni) = sample_gaussian(
        params.means.row(i).transpose(), params.covariances[i], params.sigma,
        ni, root.child("cluster", static_cast<std::uint64_t>(i)));
    std::fill(pre.planted_labels.begin() + offset,
              pre.planted_labels.begin() + offset + ni,
              static_cast<std::uint32_t>(i));
    offset += ni;
  }

  return perturb(pre, adversary, root.child("adversary"));
}

}  // namespace srgmm
