#pragma once

#include <string>

#include "srgmm/conditions.hpp"
#include "srgmm/lloyd.hpp"
#include "srgmm/lowerbound.hpp"
#include "srgmm/types.hpp"

namespace srgmm {

// Binary instance container: a one-line JSON header (magic "SRGMM1", sizes,
// sigma, cluster sizes, seed, adversary description, planted means, and
// whether pre-perturbation points follow), then row-major little-endian
// doubles for the points, uint32 labels, and optionally the pre-perturbation
// points. Writing the same instance twice produces identical bytes.
void write_instance(const Instance& instance, const std::string& path);
Instance read_instance(const std::string& path);
std::string instance_header_json(const Instance& instance);

std::string clustering_to_json(const Clustering& clustering);
Clustering clustering_from_json(const std::string& text);

std::string eval_report_to_json(const EvalReport& report);
std::string condition_report_to_json(const ConditionReport& report);
std::string certificate_to_json(const LowerBoundCertificate& cert);

// One JSON object per line, one line per recorded iteration.
std::string trace_to_jsonl(const LloydTrace& trace);

}  // namespace srgmm
