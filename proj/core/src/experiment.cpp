#include "srgmm/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "srgmm/evaluation.hpp"
#include "srgmm/instance_io.hpp"

namespace srgmm {

namespace {

using ordered_json = nlohmann::ordered_json;

void expect_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                 const std::string& where) {
  if (!obj.is_object())
    throw InvalidSpec(where + " must be a JSON object");
  for (const auto& item : obj.items())
    if (allowed.find(item.key()) == allowed.end())
      throw InvalidSpec("unknown key \"" + item.key() + "\" in " + where);
}

double number_field(const ordered_json& obj, const char* key,
                    const std::string& where) {
  if (!obj.contains(key))
    throw InvalidSpec(where + " requires \"" + key + "\"");
  if (!obj[key].is_number())
    throw InvalidSpec(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

Matrix matrix_field(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw InvalidSpec(where + " must be a nonempty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw InvalidSpec(where + " rows must be nonempty arrays");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw InvalidSpec(where + " rows must all have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number())
        throw InvalidSpec(where + " entries must be numbers");
      m(static_cast<Index>(i), static_cast<Index>(c)) = j[i][c].get<double>();
    }
  }
  return m;
}

CovarianceSpec covariance_from_json(const ordered_json& j,
                                    const std::string& where) {
  expect_keys(j, {"kind", "sigma", "values", "matrix"}, where);
  if (!j.contains("kind") || !j["kind"].is_string())
    throw InvalidSpec(where + " requires a string \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "spherical") {
    expect_keys(j, {"kind", "sigma"}, where);
    return CovarianceSpec::spherical(number_field(j, "sigma", where));
  }
  if (kind == "diagonal") {
    expect_keys(j, {"kind", "values"}, where);
    if (!j.contains("values") || !j["values"].is_array())
      throw InvalidSpec(where + " requires an array \"values\"");
    Vector v(static_cast<Index>(j["values"].size()));
    for (std::size_t i = 0; i < j["values"].size(); ++i) {
      if (!j["values"][i].is_number())
        throw InvalidSpec(where + ".values entries must be numbers");
      v[static_cast<Index>(i)] = j["values"][i].get<double>();
    }
    return CovarianceSpec::diag(std::move(v));
  }
  if (kind == "full") {
    expect_keys(j, {"kind", "matrix"}, where);
    if (!j.contains("matrix"))
      throw InvalidSpec(where + " requires \"matrix\"");
    return CovarianceSpec::dense(matrix_field(j["matrix"], where + ".matrix"));
  }
  throw InvalidSpec(where + ".kind must be spherical|diagonal|full");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw InvalidInput("failed while writing " + path.string());
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw InvalidSpec("experiment config is not valid JSON");
  expect_keys(j, {"model", "adversary", "seeding", "seeds", "lloyd", "outputs"},
              "config");
  if (!j.contains("model")) throw InvalidSpec("config requires \"model\"");
  if (!j.contains("seeds")) throw InvalidSpec("config requires \"seeds\"");

  ExperimentConfig cfg;
  const ordered_json& model = j["model"];
  expect_keys(model,
              {"k", "d", "N", "delta", "sigma", "sizes", "weights",
               "placement", "means", "covariances"},
              "model");
  if (!model.contains("k") || !model["k"].is_number_integer())
    throw InvalidSpec("model.k must be an integer");
  if (!model.contains("d") || !model["d"].is_number_integer())
    throw InvalidSpec("model.d must be an integer");
  cfg.recipe.k = model["k"].get<int>();
  cfg.recipe.d = model["d"].get<Index>();
  cfg.recipe.sigma = number_field(model, "sigma", "model");

  if (model.contains("means")) {
    if (model.contains("delta") || model.contains("placement"))
      throw InvalidSpec(
          "model.means excludes model.delta and model.placement");
    cfg.recipe.means = matrix_field(model["means"], "model.means");
  } else {
    cfg.recipe.delta = number_field(model, "delta", "model");
    if (model.contains("placement")) {
      if (!model["placement"].is_string())
        throw InvalidSpec("model.placement must be a string");
      const std::string p = model["placement"].get<std::string>();
      if (p == "orthogonal")
        cfg.recipe.placement = MeanPlacement::Orthogonal;
      else if (p == "random")
        cfg.recipe.placement = MeanPlacement::Random;
      else
        throw InvalidSpec("model.placement must be orthogonal|random");
    }
  }

  if (model.contains("sizes") && model.contains("weights"))
    throw InvalidSpec("model.sizes and model.weights are mutually exclusive");
  if (model.contains("sizes")) {
    if (!model["sizes"].is_array() || model["sizes"].empty())
      throw InvalidSpec("model.sizes must be a nonempty array");
    std::vector<std::int64_t> sizes;
    std::int64_t total = 0;
    for (const auto& s : model["sizes"]) {
      if (!s.is_number_integer())
        throw InvalidSpec("model.sizes entries must be integers");
      sizes.push_back(s.get<std::int64_t>());
      total += s.get<std::int64_t>();
    }
    cfg.recipe.sizes = std::move(sizes);
    cfg.recipe.total = total;
    if (model.contains("N") &&
        model["N"].get<std::int64_t>() != total)
      throw InvalidSpec("model.N disagrees with the sum of model.sizes");
  } else if (model.contains("weights")) {
    if (!model.contains("N") || !model["N"].is_number_integer())
      throw InvalidSpec("model.weights requires model.N");
    if (!model["weights"].is_array() || model["weights"].empty())
      throw InvalidSpec("model.weights must be a nonempty array");
    std::vector<double> weights;
    for (const auto& w : model["weights"]) {
      if (!w.is_number())
        throw InvalidSpec("model.weights entries must be numbers");
      weights.push_back(w.get<double>());
    }
    cfg.recipe.weights = std::move(weights);
    cfg.recipe.total = model["N"].get<std::int64_t>();
  } else {
    throw InvalidSpec("model requires either sizes or weights");
  }

  if (model.contains("covariances")) {
    if (!model["covariances"].is_array())
      throw InvalidSpec("model.covariances must be an array");
    for (std::size_t i = 0; i < model["covariances"].size(); ++i)
      cfg.recipe.covariances.push_back(covariance_from_json(
          model["covariances"][i],
          "model.covariances[" + std::to_string(i) + "]"));
  }

  if (j.contains("adversary"))
    cfg.adversary = AdversarySpec::from_json_text(j["adversary"].dump());

  if (j.contains("seeding")) {
    if (!j["seeding"].is_string())
      throw InvalidSpec("seeding must be a string");
    const std::string s = j["seeding"].get<std::string>();
    if (s == "weak")
      cfg.seeding = SeedingMode::Weak;
    else if (s == "strong")
      cfg.seeding = SeedingMode::Strong;
    else if (s == "auto")
      cfg.seeding = SeedingMode::Auto;
    else
      throw InvalidSpec("seeding must be weak|strong|auto");
  }

  if (!j["seeds"].is_array() || j["seeds"].empty())
    throw InvalidSpec("seeds must be a nonempty array");
  for (const auto& s : j["seeds"]) {
    if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
      throw InvalidSpec("seeds entries must be nonnegative integers");
    cfg.seeds.push_back(s.get<std::uint64_t>());
  }

  if (j.contains("lloyd")) {
    const ordered_json& l = j["lloyd"];
    expect_keys(l, {"max_iters", "drift_tol"}, "lloyd");
    if (l.contains("max_iters")) {
      if (!l["max_iters"].is_number_integer())
        throw InvalidSpec("lloyd.max_iters must be an integer");
      cfg.lloyd.max_iters = l["max_iters"].get<int>();
    }
    if (l.contains("drift_tol"))
      cfg.lloyd.drift_tol = number_field(l, "drift_tol", "lloyd");
  }

  if (j.contains("outputs")) {
    const ordered_json& o = j["outputs"];
    expect_keys(o, {"dir"}, "outputs");
    if (o.contains("dir")) {
      if (!o["dir"].is_string())
        throw InvalidSpec("outputs.dir must be a string");
      cfg.output_dir = o["dir"].get<std::string>();
    }
  }
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.seeds.empty())
    throw InvalidSpec("experiment needs at least one seed");
  namespace fs = std::filesystem;
  if (!config.output_dir.empty())
    fs::create_directories(config.output_dir);

  ExperimentResult result;
  for (const std::uint64_t seed : config.seeds) {
    const SeedTree root = SeedTree::root(seed);
    const MixtureParams params =
        resolve_recipe(config.recipe, root.child("recipe"));
    const Instance inst = generate_instance(params, config.adversary, seed);
    const SeedingMode resolved =
        resolve_seeding(config.seeding, params.w_min(), params.k);
    const Matrix centers0 =
        initial_centers(inst, resolved, root.child("init"));
    LloydTrace trace;
    const Clustering cl =
        run_lloyd(inst.points, centers0, params.sigma, config.lloyd, &trace);
    const EvalReport rep = evaluate(inst, cl);

    ExperimentRow row;
    row.seed = seed;
    row.n = inst.n();
    row.d = static_cast<int>(inst.dim());
    row.k = params.k;
    row.delta = params.k >= 2 ? separation(params) : 0.0;
    row.sigma = params.sigma;
    row.w_min = params.w_min();
    row.seeding = resolved == SeedingMode::Weak ? "weak" : "strong";
    row.iterations = cl.iteration_count;
    row.converged = trace.converged;
    row.total_misclassified = rep.total_misclassified;
    row.kmeans_cost = rep.kmeans_cost;
    row.locally_optimal = rep.locally_optimal;
    result.rows.push_back(row);

    if (!config.output_dir.empty()) {
      const fs::path dir(config.output_dir);
      const std::string tag = std::to_string(seed);
      write_text(dir / ("clustering-" + tag + ".json"),
                 clustering_to_json(cl) + "\n");
      write_text(dir / ("eval-" + tag + ".json"),
                 eval_report_to_json(rep) + "\n");
      write_text(dir / ("trace-" + tag + ".jsonl"), trace_to_jsonl(trace));
    }
  }

  if (!config.output_dir.empty())
    write_text(fs::path(config.output_dir) / "sweep.csv", sweep_csv(result));
  return result;
}

std::string sweep_csv(const ExperimentResult& result) {
  std::string csv =
      "seed,n,d,k,delta,sigma,w_min,seeding,iterations,converged,"
      "total_misclassified,kmeans_cost,locally_optimal\n";
  for (const ExperimentRow& r : result.rows) {
    csv += std::to_string(r.seed);
    csv += ',';
    csv += std::to_string(r.n);
    csv += ',';
    csv += std::to_string(r.d);
    csv += ',';
    csv += std::to_string(r.k);
    csv += ',';
    csv += format_double(r.delta);
    csv += ',';
    csv += format_double(r.sigma);
    csv += ',';
    csv += format_double(r.w_min);
    csv += ',';
    csv += r.seeding;
    csv += ',';
    csv += std::to_string(r.iterations);
    csv += ',';
    csv += r.converged ? '1' : '0';
    csv += ',';
    csv += std::to_string(r.total_misclassified);
    csv += ',';
    csv += format_double(r.kmeans_cost);
    csv += ',';
    csv += r.locally_optimal ? '1' : '0';
    csv += '\n';
  }
  return csv;
}

}  // namespace srgmm
