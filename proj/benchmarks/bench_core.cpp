// Microbenchmarks for the numeric hot paths.
#include <benchmark/benchmark.h>

#include "srgmm/conditions.hpp"
#include "srgmm/linalg.hpp"
#include "srgmm/lloyd.hpp"
#include "srgmm/random.hpp"

namespace {

using namespace srgmm;

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  const SeedTree s = SeedTree::root(seed).child("bench");
  Matrix m(rows, cols);
  std::uint64_t c = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = s.normal(c++);
  return m;
}

void BM_Assign(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix points = random_matrix(n, 50, 1);
  const Matrix centers = random_matrix(8, 50, 2);
  for (auto _ : state) {
    auto labels = assign(points, centers);
    benchmark::DoNotOptimize(labels.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Assign)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_UpdateCenters(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix points = random_matrix(n, 50, 3);
  const Matrix centers = random_matrix(8, 50, 4);
  const auto labels = assign(points, centers);
  for (auto _ : state) {
    Matrix updated = update_centers(points, labels, 8, centers);
    benchmark::DoNotOptimize(updated.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_UpdateCenters)->Arg(10000)->Arg(100000);

void BM_TopkSvd(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix a = random_matrix(n, 64, 5);
  for (auto _ : state) {
    auto proj = topk_svd(a, 8);
    benchmark::DoNotOptimize(proj.basis.data());
  }
}
BENCHMARK(BM_TopkSvd)->Arg(512)->Arg(2048);

void BM_SampleGaussian(benchmark::State& state) {
  const Index n = state.range(0);
  const Vector mean = Vector::Zero(64);
  const CovarianceSpec cov = CovarianceSpec::spherical(1.0);
  const SeedTree s = SeedTree::root(9).child("draws");
  for (auto _ : state) {
    Matrix draws = sample_gaussian(mean, cov, 1.0, n, s);
    benchmark::DoNotOptimize(draws.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleGaussian)->Arg(1000)->Arg(10000);

void BM_BadDirectionCount(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix points = random_matrix(n, 50, 7);
  const std::vector<std::uint32_t> labels(static_cast<std::size_t>(n), 0);
  const Matrix means = Matrix::Zero(1, 50);
  Vector dir = Vector::Zero(50);
  dir(0) = 1.0;
  for (auto _ : state) {
    auto count = bad_direction_count(points, labels, means, 1.0, 2.0, dir);
    benchmark::DoNotOptimize(count);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BadDirectionCount)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
