#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srgmm/adversary.hpp"
#include "srgmm/generator.hpp"
#include "srgmm/lloyd.hpp"
#include "srgmm/seeding.hpp"
#include "srgmm/types.hpp"

namespace srgmm {

struct ExperimentConfig {
  GeneratorRecipe recipe;
  AdversarySpec adversary = AdversarySpec::identity();
  SeedingMode seeding = SeedingMode::Auto;
  std::vector<std::uint64_t> seeds;
  LloydOptions lloyd;
  std::string output_dir;  // empty: keep everything in memory

  // Strict parser: any key outside the documented schema is rejected by
  // name (InvalidSpec).
  static ExperimentConfig from_json_text(const std::string& text);
};

struct ExperimentRow {
  std::uint64_t seed = 0;
  Index n = 0;
  int d = 0;
  int k = 0;
  double delta = 0;  // realized separation in sigma units
  double sigma = 0;
  double w_min = 0;
  std::string seeding;  // resolved mode actually used
  int iterations = 0;
  bool converged = false;
  std::int64_t total_misclassified = 0;
  double kmeans_cost = 0;
  bool locally_optimal = false;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
};

// One generate -> seed -> Lloyd -> evaluate pipeline per configured seed.
// When output_dir is set, writes clustering-<seed>.json, eval-<seed>.json,
// trace-<seed>.jsonl per seed plus sweep.csv, all with reproducible bytes.
ExperimentResult run_experiment(const ExperimentConfig& config);

// CSV table of the result rows (doubles printed with %.17g).
std::string sweep_csv(const ExperimentResult& result);

}  // namespace srgmm
