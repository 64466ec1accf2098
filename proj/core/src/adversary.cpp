#include "srgmm/adversary.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace srgmm {

using json = nlohmann::ordered_json;

AdversarySpec AdversarySpec::identity() {
  AdversarySpec s;
  s.kind = Kind::Identity;
  return s;
}

AdversarySpec AdversarySpec::uniform_shrink_constant(double lambda) {
  AdversarySpec s;
  s.kind = Kind::UniformShrink;
  s.constant_lambda = true;
  s.lambda = lambda;
  return s;
}

AdversarySpec AdversarySpec::uniform_shrink(double low, double high) {
  AdversarySpec s;
  s.kind = Kind::UniformShrink;
  s.constant_lambda = false;
  s.low = low;
  s.high = high;
  return s;
}

AdversarySpec AdversarySpec::core_collapse(double fraction) {
  AdversarySpec s;
  s.kind = Kind::CoreCollapse;
  s.fraction = fraction;
  return s;
}

AdversarySpec AdversarySpec::halfspace_collapse_random() {
  AdversarySpec s;
  s.kind = Kind::HalfspaceCollapse;
  s.random_directions = true;
  return s;
}

AdversarySpec AdversarySpec::halfspace_collapse(std::map<int, Vector> dirs) {
  AdversarySpec s;
  s.kind = Kind::HalfspaceCollapse;
  s.random_directions = false;
  s.directions = std::move(dirs);
  return s;
}

AdversarySpec AdversarySpec::mean_shift(std::map<int, Vector> dirs) {
  AdversarySpec s = halfspace_collapse(std::move(dirs));
  s.kind = Kind::MeanShift;
  return s;
}

void AdversarySpec::validate(Index d, int k) const {
  switch (kind) {
    case Kind::Identity:
      break;
    case Kind::UniformShrink:
      if (constant_lambda) {
        if (!(lambda >= 0.0 && lambda <= 1.0))
          throw InvalidSpec("uniform_shrink lambda must lie in [0,1]");
      } else {
        if (!(low >= 0.0 && high <= 1.0 && low <= high))
          throw InvalidSpec("uniform_shrink range must satisfy 0 <= a <= b <= 1");
      }
      break;
    case Kind::CoreCollapse:
      if (!(fraction >= 0.0 && fraction <= 1.0))
        throw InvalidSpec("core_collapse fraction must lie in [0,1]");
      break;
    case Kind::HalfspaceCollapse:
    case Kind::MeanShift:
      if (!random_directions) {
        if (directions.empty())
          throw InvalidSpec("halfspace_collapse needs at least one direction");
        for (const auto& [cluster, dir] : directions) {
          if (cluster < 0 || (k >= 0 && cluster >= k))
            throw InvalidSpec("direction references cluster index " +
                              std::to_string(cluster) + " out of range");
          if (d >= 0 && dir.size() != d)
            throw InvalidSpec("direction has wrong dimension");
          if (std::abs(dir.norm() - 1.0) > 1e-9)
            throw InvalidSpec("directions must be unit vectors");
        }
      }
      break;
  }
}

std::string AdversarySpec::to_json_text() const {
  json j;
  switch (kind) {
    case Kind::Identity:
      j["kind"] = "identity";
      break;
    case Kind::UniformShrink:
      j["kind"] = "uniform_shrink";
      if (constant_lambda) {
        j["dist"] = "constant";
        j["lambda"] = lambda;
      } else {
        j["dist"] = "uniform";
        j["low"] = low;
        j["high"] = high;
      }
      break;
    case Kind::CoreCollapse:
      j["kind"] = "core_collapse";
      j["fraction"] = fraction;
      break;
    case Kind::HalfspaceCollapse:
    case Kind::MeanShift:
      j["kind"] = kind == Kind::MeanShift ? "mean_shift" : "halfspace_collapse";
      if (random_directions) {
        j["directions"] = "random";
      } else {
        json dirs = json::object();
        for (const auto& [cluster, dir] : directions) {
          json arr = json::array();
          for (Index i = 0; i < dir.size(); ++i) arr.push_back(dir[i]);
          dirs[std::to_string(cluster)] = std::move(arr);
        }
        j["directions"] = std::move(dirs);
      }
      break;
  }
  return j.dump();
}

AdversarySpec AdversarySpec::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("adversary descriptor is not valid JSON: ") +
                      e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw InvalidSpec("adversary descriptor needs a string field `kind`");
  const std::string kind = j["kind"];

  auto expect_keys = [&](std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = it.key() == "kind";
      for (const char* k : keys) known = known || it.key() == k;
      if (!known)
        throw InvalidSpec("unknown key `" + it.key() +
                          "` in adversary descriptor");
    }
  };
  auto require = [&](const char* key) -> const json& {
    if (!j.contains(key))
      throw InvalidSpec(std::string("adversary descriptor missing `") + key +
                        "`");
    return j[key];
  };

  AdversarySpec s;
  if (kind == "identity") {
    expect_keys({});
    s = identity();
  } else if (kind == "uniform_shrink") {
    expect_keys({"dist", "lambda", "low", "high"});
    const std::string dist = require("dist");
    if (dist == "constant") {
      s = uniform_shrink_constant(require("lambda").get<double>());
    } else if (dist == "uniform") {
      s = uniform_shrink(require("low").get<double>(),
                         require("high").get<double>());
    } else {
      throw InvalidSpec("uniform_shrink dist must be constant|uniform");
    }
  } else if (kind == "core_collapse") {
    expect_keys({"fraction"});
    s = core_collapse(require("fraction").get<double>());
  } else if (kind == "halfspace_collapse" || kind == "mean_shift") {
    expect_keys({"directions"});
    const json& dirs = require("directions");
    if (dirs.is_string() && dirs.get<std::string>() == "random") {
      s = halfspace_collapse_random();
    } else if (dirs.is_object()) {
      std::map<int, Vector> m;
      for (auto it = dirs.begin(); it != dirs.end(); ++it) {
        int cluster = 0;
        try {
          cluster = std::stoi(it.key());
        } catch (...) {
          throw InvalidSpec("direction keys must be cluster indices");
        }
        if (!it.value().is_array())
          throw InvalidSpec("directions must be arrays of numbers");
        Vector v(it.value().size());
        for (std::size_t i = 0; i < it.value().size(); ++i)
          v[static_cast<Index>(i)] = it.value()[i].get<double>();
        m[cluster] = std::move(v);
      }
      s = halfspace_collapse(std::move(m));
    } else {
      throw InvalidSpec("directions must be \"random\" or a cluster->vector map");
    }
    if (kind == "mean_shift") s.kind = Kind::MeanShift;
  } else {
    throw InvalidSpec("unknown adversary kind `" + kind + "`");
  }
  s.validate(-1, -1);
  return s;
}

Vector halfspace_collapse_map(const Vector& y, const Vector& mu,
                              const Vector& e_hat) {
  if (y.size() != mu.size() || y.size() != e_hat.size())
    throw InvalidParams("halfspace_collapse_map dimension mismatch");
  if (std::abs(e_hat.norm() - 1.0) > 1e-9)
    throw InvalidParams("e_hat must be a unit vector");
  return (y - mu).dot(e_hat) < 0.0 ? mu : y;
}

Instance perturb(const Instance& instance_pre, const AdversarySpec& spec,
                 const SeedTree& stream) {
  instance_pre.validate();
  spec.validate(instance_pre.dim(), instance_pre.params.k);

  const Matrix& y = instance_pre.points;
  const Matrix& means = instance_pre.params.means;
  const std::int64_t n = y.rows();
  const int k = instance_pre.params.k;

  Instance out;
  out.params = instance_pre.params;
  out.planted_labels = instance_pre.planted_labels;
  out.provenance.seed = instance_pre.provenance.seed;
  out.provenance.adversary = spec.to_json_text();
  out.points = y;

  switch (spec.kind) {
    case AdversarySpec::Kind::Identity:
      break;

    case AdversarySpec::Kind::UniformShrink: {
      for (std::int64_t t = 0; t < n; ++t) {
        const double l = spec.constant_lambda
                             ? spec.lambda
                             : spec.low + (spec.high - spec.low) *
                                              stream.uniform(static_cast<std::uint64_t>(t));
        const auto mu = means.row(instance_pre.planted_labels[t]);
        out.points.row(t) = mu + l * (y.row(t) - mu);
      }
      break;
    }

    case AdversarySpec::Kind::CoreCollapse: {
      // Collapse an exact p-fraction of every cluster, chosen by a derived
      // stream over cluster-local order so the selection is reproducible.
      std::vector<std::vector<std::int64_t>> members(k);
      for (std::int64_t t = 0; t < n; ++t)
        members[instance_pre.planted_labels[t]].push_back(t);
      for (int i = 0; i < k; ++i) {
        const auto& rows = members[i];
        const std::int64_t take = llround(spec.fraction * static_cast<double>(rows.size()));
        const auto order = shuffle_indices(
            static_cast<std::int64_t>(rows.size()),
            stream.child("core", static_cast<std::uint64_t>(i)));
        for (std::int64_t j = 0; j < take; ++j)
          out.points.row(rows[order[j]]) = means.row(i);
      }
      break;
    }

    case AdversarySpec::Kind::HalfspaceCollapse:
    case AdversarySpec::Kind::MeanShift: {
      std::map<int, Vector> dirs;
      if (spec.random_directions) {
        for (int i = 0; i < k; ++i)
          dirs[i] = sample_unit_direction(
              instance_pre.dim(),
              stream.child("dir", static_cast<std::uint64_t>(i)));
      } else {
        dirs = spec.directions;
      }
      for (std::int64_t t = 0; t < n; ++t) {
        const int i = static_cast<int>(instance_pre.planted_labels[t]);
        auto it = dirs.find(i);
        if (it == dirs.end()) continue;  // cluster left untouched
        const auto mu = means.row(i);
        if ((y.row(t) - mu).dot(it->second) < 0.0) out.points.row(t) = mu;
      }
      break;
    }
  }

  out.pre_perturbation_points = y;
  return out;
}

}  // namespace srgmm
