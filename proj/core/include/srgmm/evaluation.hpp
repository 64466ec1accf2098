#pragma once

#include <cstdint>
#include <vector>

#include "srgmm/types.hpp"

namespace srgmm {

// Maximum-total-weight assignment on a square score matrix (Hungarian
// algorithm with potentials, O(n^3)). Returns perm with perm[row] = column.
std::vector<int> max_weight_assignment(const Matrix& score);

// k x k counts: entry (p, c) is the number of points with planted label p
// and computed label c.
Matrix confusion_matrix(const std::vector<std::uint32_t>& planted,
                        const std::vector<std::uint32_t>& computed, int k);

// Agreement-maximizing matching; perm[planted cluster] = computed cluster.
std::vector<int> match_labels(const std::vector<std::uint32_t>& planted,
                              const std::vector<std::uint32_t>& computed,
                              int k);

// Full comparison of a computed clustering against the planted one.
EvalReport evaluate(const Instance& instance, const Clustering& clustering);

}  // namespace srgmm
