#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "srgmm/experiment.hpp"
#include "test_util.hpp"

using namespace srgmm;
namespace fs = std::filesystem;

namespace {

const char* kConfig = R"({
  "model": {"k": 3, "d": 8, "sigma": 1.0, "delta": 40.0,
            "weights": [0.5, 0.3, 0.2], "N": 600},
  "adversary": {"kind": "uniform_shrink", "dist": "uniform", "low": 0.0, "high": 1.0},
  "seeding": "auto",
  "seeds": [7, 8],
  "lloyd": {"max_iters": 100, "drift_tol": 1e-6}
})";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("experiment configs parse the documented schema") {
  const auto cfg = ExperimentConfig::from_json_text(kConfig);
  CHECK(cfg.recipe.k == 3);
  CHECK(cfg.recipe.d == 8);
  CHECK(cfg.recipe.total == 600);
  REQUIRE(cfg.recipe.weights.has_value());
  CHECK(cfg.recipe.weights->size() == 3);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{7, 8});
  CHECK(cfg.seeding == SeedingMode::Auto);
  CHECK(cfg.lloyd.max_iters == 100);
  CHECK(cfg.adversary.kind == AdversarySpec::Kind::UniformShrink);
}

TEST_CASE("unknown or conflicting config keys are rejected by name") {
  try {
    ExperimentConfig::from_json_text(R"({"modell": {}, "seeds": [1]})");
    FAIL("expected InvalidSpec");
  } catch (const InvalidSpec& e) {
    CHECK(std::string(e.what()).find("modell") != std::string::npos);
  }

  try {
    ExperimentConfig::from_json_text(R"({
      "model": {"k": 2, "d": 2, "sigma": 1.0, "delta": 5.0,
                "sizes": [10, 10], "fuzz": 3},
      "seeds": [1]})");
    FAIL("expected InvalidSpec");
  } catch (const InvalidSpec& e) {
    CHECK(std::string(e.what()).find("fuzz") != std::string::npos);
  }

  // sizes and weights are mutually exclusive.
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({
      "model": {"k": 2, "d": 2, "sigma": 1.0, "delta": 5.0,
                "sizes": [10, 10], "weights": [0.5, 0.5], "N": 20},
      "seeds": [1]})"),
                  InvalidSpec);

  // seeds must be present and nonempty.
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({
      "model": {"k": 2, "d": 2, "sigma": 1.0, "delta": 5.0, "sizes": [10, 10]}})"),
                  InvalidSpec);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({
      "model": {"k": 2, "d": 2, "sigma": 1.0, "delta": 5.0, "sizes": [10, 10]},
      "seeds": []})"),
                  InvalidSpec);

  // means exclude delta/placement.
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({
      "model": {"k": 2, "d": 2, "sigma": 1.0, "delta": 5.0,
                "means": [[0, 0], [9, 0]], "sizes": [10, 10]},
      "seeds": [1]})"),
                  InvalidSpec);

  CHECK_THROWS_AS(ExperimentConfig::from_json_text("not json"), InvalidSpec);
}

TEST_CASE("experiments run one pipeline per seed and fill every row") {
  auto cfg = ExperimentConfig::from_json_text(kConfig);
  const auto result = run_experiment(cfg);
  REQUIRE(result.rows.size() == 2);
  for (const auto& row : result.rows) {
    CHECK(row.n == 600);
    CHECK(row.d == 8);
    CHECK(row.k == 3);
    CHECK(row.delta == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(row.sigma == 1.0);
    CHECK(row.w_min > 0.1);
    CHECK((row.seeding == "weak" || row.seeding == "strong"));
    CHECK(row.iterations >= 1);
    CHECK(row.converged);
    CHECK(row.kmeans_cost > 0);
    // At separation 40 the pipeline recovers the planted clustering.
    CHECK(row.total_misclassified == 0);
    CHECK(row.locally_optimal);
  }
  CHECK(result.rows[0].seed == 7);
  CHECK(result.rows[1].seed == 8);
}

TEST_CASE("sweep CSV has a header row, one line per seed, and reruns match") {
  auto cfg = ExperimentConfig::from_json_text(kConfig);
  const auto result = run_experiment(cfg);
  const std::string csv = sweep_csv(result);
  std::istringstream lines(csv);
  std::string header;
  REQUIRE(std::getline(lines, header));
  CHECK(header ==
        "seed,n,d,k,delta,sigma,w_min,seeding,iterations,converged,"
        "total_misclassified,kmeans_cost,locally_optimal");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    ++rows;
    std::size_t commas = 0;
    for (char c : line)
      if (c == ',') ++commas;
    CHECK(commas == 12);
  }
  CHECK(rows == 2);

  const auto again = run_experiment(cfg);
  CHECK(sweep_csv(again) == csv);
}

TEST_CASE("configured output directories receive reproducible artifacts") {
  static std::atomic<int> counter{0};
  const fs::path dir = fs::temp_directory_path() /
                       ("srgmm_exp_test_" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(dir);

  auto cfg = ExperimentConfig::from_json_text(kConfig);
  cfg.seeds = {7};
  cfg.output_dir = dir.string();
  (void)run_experiment(cfg);
  for (const char* name :
       {"sweep.csv", "clustering-7.json", "eval-7.json", "trace-7.jsonl"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }
  const std::string first = slurp((dir / "sweep.csv").string());
  (void)run_experiment(cfg);
  CHECK(slurp((dir / "sweep.csv").string()) == first);

  std::error_code ec;
  fs::remove_all(dir, ec);
}
