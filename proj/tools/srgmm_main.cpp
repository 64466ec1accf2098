// Command-line front end: generate | cluster | evaluate | check-conditions |
// lowerbound | experiment. All output is deterministic for fixed inputs (no
// timestamps, fixed float formatting), so reruns are byte-identical.
//
// Exit codes: 0 success, 1 failed verdict (conditions / lower-bound
// certificate), 2 usage or config-schema error, 3 malformed instance or IO
// failure.

#include <Eigen/Core>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "srgmm/conditions.hpp"
#include "srgmm/evaluation.hpp"
#include "srgmm/experiment.hpp"
#include "srgmm/generator.hpp"
#include "srgmm/instance_io.hpp"
#include "srgmm/lloyd.hpp"
#include "srgmm/lowerbound.hpp"
#include "srgmm/seeding.hpp"
#include "srgmm/types.hpp"

namespace {

using namespace srgmm;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string slurp_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidSpec("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string slurp_data(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  out << text;
  if (!out) throw InvalidInput("failed while writing " + path);
}

SeedingMode parse_seeding(const std::string& s) {
  if (s == "weak") return SeedingMode::Weak;
  if (s == "strong") return SeedingMode::Strong;
  return SeedingMode::Auto;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-random Gaussian mixture clustering workbench"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "linear-algebra thread count")
      ->check(CLI::PositiveNumber);

  int rc = 0;

  // generate -------------------------------------------------------------
  auto* gen = app.add_subcommand(
      "generate", "sample an instance from a config and write it");
  std::string g_config, g_out;
  std::uint64_t g_seed = 0;
  gen->add_option("--config", g_config, "experiment config JSON")->required();
  gen->add_option("--out", g_out, "instance output path")->required();
  gen->add_option("--seed", g_seed,
                  "root seed (default: first seed in the config)");
  gen->callback([&] {
    Eigen::setNbThreads(threads);
    const ExperimentConfig cfg =
        ExperimentConfig::from_json_text(slurp_config(g_config));
    const std::uint64_t seed =
        gen->count("--seed") ? g_seed
                             : (cfg.seeds.empty() ? 0 : cfg.seeds.front());
    const SeedTree root = SeedTree::root(seed);
    const MixtureParams params =
        resolve_recipe(cfg.recipe, root.child("recipe"));
    const Instance inst = generate_instance(params, cfg.adversary, seed);
    write_instance(inst, g_out);
    std::cout << "wrote " << g_out << "\n";
    std::cout << "delta="
              << (params.k >= 2 ? fmt(separation(params)) : "nan") << "\n";
    std::cout << "w_min=" << fmt(params.w_min()) << "\n";
  });

  // cluster ----------------------------------------------------------------
  auto* clu = app.add_subcommand(
      "cluster", "seed and run Lloyd's iterations on an instance");
  std::string c_instance, c_out, c_trace, c_seeding = "auto";
  std::uint64_t c_seed = 0;
  bool c_reseed = false;
  int c_max_iters = 200;
  double c_drift = 1e-6;
  clu->add_option("--instance", c_instance, "instance file")->required();
  clu->add_option("--out", c_out, "clustering JSON output path")->required();
  clu->add_option("--seeding", c_seeding, "weak|strong|auto (default auto)")
      ->check(CLI::IsMember({"weak", "strong", "auto"}));
  clu->add_option("--seed", c_seed,
                  "seeding randomness (default: the instance's seed)");
  clu->add_flag("--reseed-empty", c_reseed,
                "reseed emptied clusters at the farthest point");
  clu->add_option("--max-iters", c_max_iters, "iteration cap (default 200)")
      ->check(CLI::PositiveNumber);
  clu->add_option("--drift-tol", c_drift,
                  "stop when centers move < tol * sigma (default 1e-6)");
  clu->add_option("--trace", c_trace, "write per-iteration JSONL here");
  clu->callback([&] {
    Eigen::setNbThreads(threads);
    const Instance inst = read_instance(c_instance);
    const std::uint64_t seed =
        clu->count("--seed") ? c_seed : inst.provenance.seed;
    const SeedingMode resolved = resolve_seeding(
        parse_seeding(c_seeding), inst.params.w_min(), inst.params.k);
    const Matrix centers0 =
        initial_centers(inst, resolved, SeedTree::root(seed).child("init"));
    LloydOptions opts;
    opts.max_iters = c_max_iters;
    opts.drift_tol = c_drift;
    opts.reseed_empty = c_reseed;
    LloydTrace trace;
    const Clustering cl =
        run_lloyd(inst.points, centers0, inst.params.sigma, opts, &trace);
    write_text_file(c_out, clustering_to_json(cl) + "\n");
    if (!c_trace.empty()) write_text_file(c_trace, trace_to_jsonl(trace));
    std::cout << "seeding="
              << (resolved == SeedingMode::Weak ? "weak" : "strong") << "\n";
    std::cout << "iterations=" << cl.iteration_count << "\n";
    std::cout << "converged=" << (trace.converged ? 1 : 0) << "\n";
    std::cout << "cost="
              << fmt(kmeans_cost(inst.points, cl.centers, cl.labels)) << "\n";
  });

  // evaluate ---------------------------------------------------------------
  auto* eva = app.add_subcommand(
      "evaluate", "compare a clustering against the planted one");
  std::string e_instance, e_clustering, e_out;
  eva->add_option("--instance", e_instance, "instance file")->required();
  eva->add_option("--clustering", e_clustering, "clustering JSON")->required();
  eva->add_option("--out", e_out, "evaluation JSON output path");
  eva->callback([&] {
    Eigen::setNbThreads(threads);
    const Instance inst = read_instance(e_instance);
    const Clustering cl = clustering_from_json(slurp_data(e_clustering));
    const EvalReport rep = evaluate(inst, cl);
    if (!e_out.empty())
      write_text_file(e_out, eval_report_to_json(rep) + "\n");
    std::cout << "total_misclassified=" << rep.total_misclassified << "\n";
    std::cout << "locally_optimal=" << (rep.locally_optimal ? 1 : 0) << "\n";
    std::cout << "kmeans_cost=" << fmt(rep.kmeans_cost) << "\n";
  });

  // check-conditions --------------------------------------------------------
  auto* chk = app.add_subcommand(
      "check-conditions", "verify the deterministic concentration conditions");
  std::string k_instance, k_out;
  double k_lambda = 0;
  chk->add_option("--instance", k_instance, "instance file")->required();
  chk->add_option("--lambda", k_lambda,
                  "threshold (in sigma units) for the direction search")
      ->required()
      ->check(CLI::PositiveNumber);
  chk->add_option("--out", k_out, "condition report JSON output path");
  chk->callback([&] {
    Eigen::setNbThreads(threads);
    const Instance inst = read_instance(k_instance);
    const ConditionReport rep = run_all_conditions(inst, k_lambda);
    if (!k_out.empty())
      write_text_file(k_out, condition_report_to_json(rep) + "\n");
    for (const ConditionEntry& e : rep.entries) {
      std::cout << e.name << ": measured=" << fmt(e.measured)
                << " bound=" << fmt(e.bound) << " status=" << e.status << " "
                << (e.pass ? "PASS" : "FAIL") << "\n";
    }
    std::cout << "verdict: " << (rep.verdict ? "PASS" : "FAIL") << "\n";
    if (!rep.verdict) rc = 1;
  });

  // lowerbound ---------------------------------------------------------------
  auto* low = app.add_subcommand(
      "lowerbound", "build the paired hard instance and certify it");
  LowerBoundParams lp;
  std::uint64_t l_seed = 0;
  double l_threshold = 0.9;
  std::string l_out, l_cert_out;
  low->add_option("--d", lp.d, "dimension")->required();
  low->add_option("--k", lp.k, "cluster count (even)")->required();
  low->add_option("--n", lp.n, "total points")->required();
  low->add_option("--delta", lp.delta, "within-pair separation / sigma")
      ->required();
  low->add_option("--m", lp.m, "designated points per pair")->required();
  low->add_option("--m-factor", lp.m_factor,
                  "cross-pair separation multiplier (default 100)");
  low->add_option("--sigma", lp.sigma, "noise scale (default 1)");
  low->add_option("--seed", l_seed, "root seed");
  low->add_option("--threshold", l_threshold,
                  "required misclassified fraction (default 0.9)");
  low->add_option("--out", l_out, "write the built instance here");
  low->add_option("--cert-out", l_cert_out, "write the certificate JSON here");
  low->callback([&] {
    Eigen::setNbThreads(threads);
    const LowerBoundInstance lb = build_lowerbound(lp, l_seed);
    if (!l_out.empty()) write_instance(lb.instance, l_out);
    const LowerBoundCertificate cert =
        certify_with_lloyd(lb, LloydOptions{}, l_threshold);
    if (!l_cert_out.empty())
      write_text_file(l_cert_out, certificate_to_json(cert) + "\n");
    std::cout << "designated_misclassified=" << cert.designated_misclassified
              << "/" << cert.designated_total << "\n";
    std::cout << "fraction=" << fmt(cert.designated_misclassified_fraction)
              << "\n";
    std::cout << "min_designated_projection="
              << fmt(cert.min_designated_projection) << "\n";
    std::cout << "delta_regime=" << cert.delta_regime << "\n";
    std::cout << "certificate: " << (cert.ok ? "PASS" : "FAIL") << "\n";
    if (!cert.ok) rc = 1;
  });

  // experiment ---------------------------------------------------------------
  auto* exp = app.add_subcommand(
      "experiment", "run the full pipeline over the configured seeds");
  std::string x_config;
  exp->add_option("--config", x_config, "experiment config JSON")->required();
  exp->callback([&] {
    Eigen::setNbThreads(threads);
    const ExperimentConfig cfg =
        ExperimentConfig::from_json_text(slurp_config(x_config));
    const ExperimentResult result = run_experiment(cfg);
    std::cout << sweep_csv(result);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}
