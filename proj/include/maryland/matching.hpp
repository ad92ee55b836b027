#pragma once

#include <vector>

#include <Eigen/Core>

namespace maryland {

/// Maximum bipartite matching by augmenting paths (Kuhn).
/// `adjacency[l]` lists right vertices in preference order; `initial` may hold a
/// partial left→right matching (-1 for free) that is extended, never discarded.
/// Returns left→right assignment, -1 where unmatched.
std::vector<int> max_bipartite_matching(const std::vector<std::vector<int>>& adjacency, int right_count,
                                        std::vector<int> initial = {});

/// Assignment maximizing the total weight on a square weight matrix (Hungarian method).
/// Entries equal to -infinity are forbidden. Returns row→column, -1 when a row
/// cannot be assigned.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight);

}  // namespace maryland
