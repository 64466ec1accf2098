#include "srgmm/instance_io.hpp"

#include <bit>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace srgmm {

namespace {

using ordered_json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little,
              "the instance container is defined little-endian");

void expect_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                 const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (const auto& item : obj.items())
    if (allowed.find(item.key()) == allowed.end())
      throw InvalidInput("unknown key \"" + item.key() + "\" in " + where);
}

ordered_json parse_or_throw(const std::string& text, const std::string& what) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InvalidInput("malformed JSON in " + what);
  return j;
}

ordered_json matrix_to_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw InvalidInput(where + " must be a nonempty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw InvalidInput(where + " rows must be nonempty arrays");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != cols)
      throw InvalidInput(where + " rows must all have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw InvalidInput(where + " entries must be numbers");
      m(static_cast<Index>(i), static_cast<Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

void write_blob(std::ofstream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(bytes));
  if (!out) throw InvalidInput("failed while writing instance payload");
}

void read_blob(std::ifstream& in, void* data, std::size_t bytes,
               const std::string& what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (in.gcount() != static_cast<std::streamsize>(bytes))
    throw InvalidInput("instance file truncated while reading " + what);
}

}  // namespace

std::string instance_header_json(const Instance& instance) {
  instance.validate();
  ordered_json h;
  h["magic"] = "SRGMM1";
  h["N"] = static_cast<std::int64_t>(instance.n());
  h["d"] = static_cast<std::int64_t>(instance.dim());
  h["k"] = instance.params.k;
  h["sigma"] = instance.params.sigma;
  ordered_json sizes = ordered_json::array();
  for (const std::int64_t s : instance.params.cluster_sizes)
    sizes.push_back(s);
  h["cluster_sizes"] = std::move(sizes);
  h["seed"] = instance.provenance.seed;
  h["adversary"] = instance.provenance.adversary;
  h["has_pre"] = instance.pre_perturbation_points.has_value();
  h["means"] = matrix_to_json(instance.params.means);
  return h.dump();
}

void write_instance(const Instance& instance, const std::string& path) {
  const std::string header = instance_header_json(instance);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  out << header << '\n';
  if (!out) throw InvalidInput("failed while writing instance header");
  write_blob(out, instance.points.data(),
             sizeof(double) * static_cast<std::size_t>(instance.points.size()));
  write_blob(out, instance.planted_labels.data(),
             sizeof(std::uint32_t) * instance.planted_labels.size());
  if (instance.pre_perturbation_points) {
    write_blob(out, instance.pre_perturbation_points->data(),
               sizeof(double) * static_cast<std::size_t>(
                                    instance.pre_perturbation_points->size()));
  }
  out.flush();
  if (!out) throw InvalidInput("failed while finishing " + path);
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open instance file: " + path);
  std::string header;
  if (!std::getline(in, header))
    throw InvalidInput("instance file has no header line");
  const ordered_json h = parse_or_throw(header, "instance header");
  expect_keys(h,
              {"magic", "N", "d", "k", "sigma", "cluster_sizes", "seed",
               "adversary", "has_pre", "means"},
              "instance header");
  for (const char* key : {"magic", "N", "d", "k", "sigma", "cluster_sizes",
                          "seed", "adversary", "has_pre", "means"})
    if (!h.contains(key))
      throw InvalidInput(std::string("instance header misses \"") + key +
                         "\"");
  if (!h["magic"].is_string() || h["magic"].get<std::string>() != "SRGMM1")
    throw InvalidInput("not an SRGMM1 instance file");
  if (!h["N"].is_number_integer() || !h["d"].is_number_integer() ||
      !h["k"].is_number_integer() || !h["sigma"].is_number() ||
      !h["cluster_sizes"].is_array() || !h["seed"].is_number_unsigned() ||
      !h["adversary"].is_string() || !h["has_pre"].is_boolean())
    throw InvalidInput("instance header field has the wrong type");

  const auto n = h["N"].get<std::int64_t>();
  const auto d = h["d"].get<std::int64_t>();
  const int k = h["k"].get<int>();
  if (n < 1 || d < 1 || k < 1)
    throw InvalidInput("instance header sizes must be positive");

  std::vector<std::int64_t> sizes;
  std::int64_t total = 0;
  for (const auto& s : h["cluster_sizes"]) {
    if (!s.is_number_integer() || s.get<std::int64_t>() < 1)
      throw InvalidInput("cluster_sizes must be positive integers");
    sizes.push_back(s.get<std::int64_t>());
    total += s.get<std::int64_t>();
  }
  if (static_cast<int>(sizes.size()) != k || total != n)
    throw InvalidInput("cluster_sizes must be k entries summing to N");

  const Matrix means = matrix_from_json(h["means"], "means");
  if (means.rows() != k || means.cols() != d)
    throw InvalidInput("means must be a k x d array");

  Instance inst;
  inst.params =
      MixtureParams::create_spherical(means, h["sigma"].get<double>(), sizes);
  inst.provenance.seed = h["seed"].get<std::uint64_t>();
  inst.provenance.adversary = h["adversary"].get<std::string>();

  inst.points.resize(n, d);
  read_blob(in, inst.points.data(),
            sizeof(double) * static_cast<std::size_t>(inst.points.size()),
            "points");
  inst.planted_labels.resize(static_cast<std::size_t>(n));
  read_blob(in, inst.planted_labels.data(),
            sizeof(std::uint32_t) * inst.planted_labels.size(), "labels");
  if (h["has_pre"].get<bool>()) {
    Matrix pre(n, d);
    read_blob(in, pre.data(),
              sizeof(double) * static_cast<std::size_t>(pre.size()),
              "pre-perturbation points");
    inst.pre_perturbation_points = std::move(pre);
  }
  char extra = 0;
  in.read(&extra, 1);
  if (in.gcount() != 0)
    throw InvalidInput("instance file has trailing bytes");
  inst.validate();
  return inst;
}

std::string clustering_to_json(const Clustering& clustering) {
  ordered_json j;
  j["k"] = static_cast<std::int64_t>(clustering.centers.rows());
  j["d"] = static_cast<std::int64_t>(clustering.centers.cols());
  j["iteration_count"] = clustering.iteration_count;
  j["centers"] = matrix_to_json(clustering.centers);
  ordered_json labels = ordered_json::array();
  for (const std::uint32_t lab : clustering.labels) labels.push_back(lab);
  j["labels"] = std::move(labels);
  return j.dump();
}

Clustering clustering_from_json(const std::string& text) {
  const ordered_json j = parse_or_throw(text, "clustering");
  expect_keys(j, {"k", "d", "iteration_count", "centers", "labels"},
              "clustering");
  for (const char* key : {"k", "d", "iteration_count", "centers", "labels"})
    if (!j.contains(key))
      throw InvalidInput(std::string("clustering misses \"") + key + "\"");
  if (!j["k"].is_number_integer() || !j["d"].is_number_integer() ||
      !j["iteration_count"].is_number_integer() || !j["labels"].is_array())
    throw InvalidInput("clustering field has the wrong type");
  Clustering c;
  c.centers = matrix_from_json(j["centers"], "centers");
  if (c.centers.rows() != j["k"].get<Index>() ||
      c.centers.cols() != j["d"].get<Index>())
    throw InvalidInput("centers must be a k x d array");
  c.iteration_count = j["iteration_count"].get<int>();
  c.labels.reserve(j["labels"].size());
  for (const auto& lab : j["labels"]) {
    if (!lab.is_number_integer() || lab.get<std::int64_t>() < 0 ||
        lab.get<std::int64_t>() >= c.centers.rows())
      throw InvalidInput("labels must be integers in [0, k)");
    c.labels.push_back(lab.get<std::uint32_t>());
  }
  return c;
}

std::string eval_report_to_json(const EvalReport& report) {
  ordered_json j;
  ordered_json perm = ordered_json::array();
  for (const int p : report.permutation) perm.push_back(p);
  j["permutation"] = std::move(perm);
  ordered_json sym = ordered_json::array();
  for (const std::int64_t s : report.per_cluster_symdiff) sym.push_back(s);
  j["per_cluster_symdiff"] = std::move(sym);
  j["total_misclassified"] = report.total_misclassified;
  j["kmeans_cost"] = report.kmeans_cost;
  j["locally_optimal"] = report.locally_optimal;
  j["empty_computed_clusters"] = report.empty_computed_clusters;
  j["center_distances"] = report.center_distances;
  return j.dump();
}

std::string condition_report_to_json(const ConditionReport& report) {
  ordered_json j;
  j["verdict"] = report.verdict;
  ordered_json entries = ordered_json::array();
  for (const ConditionEntry& e : report.entries) {
    ordered_json je;
    je["name"] = e.name;
    je["bound"] = e.bound;
    je["measured"] = e.measured;
    je["pass"] = e.pass;
    je["status"] = e.status;
    ordered_json w = ordered_json::array();
    for (const std::int64_t t : e.witnesses) w.push_back(t);
    je["witnesses"] = std::move(w);
    if (e.witness_direction.size() > 0) {
      ordered_json dir = ordered_json::array();
      for (Index i = 0; i < e.witness_direction.size(); ++i)
        dir.push_back(e.witness_direction[i]);
      je["witness_direction"] = std::move(dir);
    }
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j.dump();
}

std::string certificate_to_json(const LowerBoundCertificate& cert) {
  ordered_json j;
  j["ok"] = cert.ok;
  j["designated_total"] = cert.designated_total;
  j["designated_misclassified"] = cert.designated_misclassified;
  j["designated_misclassified_fraction"] =
      cert.designated_misclassified_fraction;
  j["threshold"] = cert.threshold;
  j["min_designated_projection"] = cert.min_designated_projection;
  j["max_u_norm_dev"] = cert.max_u_norm_dev;
  j["u_norm_bound"] = cert.u_norm_bound;
  j["min_cross_pair_distance"] = cert.min_cross_pair_distance;
  j["cross_bound"] = cert.cross_bound;
  j["min_collapse_shift"] = cert.min_collapse_shift;
  j["delta_regime"] = cert.delta_regime;
  j["size_condition_ok"] = cert.size_condition_ok;
  return j.dump();
}

std::string trace_to_jsonl(const LloydTrace& trace) {
  std::string out;
  for (const LloydIterationRecord& rec : trace.iterations) {
    ordered_json j;
    j["iteration"] = rec.iteration;
    j["cost"] = rec.cost;
    j["max_center_drift"] = rec.max_center_drift;
    j["reassigned"] = rec.reassigned;
    j["centers"] = matrix_to_json(rec.centers);
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace srgmm
