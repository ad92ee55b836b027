#include "maryland/matching.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace maryland {

namespace {

bool try_augment(int left, const std::vector<std::vector<int>>& adj, std::vector<int>& match_right,
                 std::vector<int>& match_left, std::vector<char>& visited) {
  for (int r : adj[static_cast<std::size_t>(left)]) {
    if (visited[static_cast<std::size_t>(r)]) continue;
    visited[static_cast<std::size_t>(r)] = 1;
    const int owner = match_right[static_cast<std::size_t>(r)];
    if (owner < 0 || try_augment(owner, adj, match_right, match_left, visited)) {
      match_right[static_cast<std::size_t>(r)] = left;
      match_left[static_cast<std::size_t>(left)] = r;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<int> max_bipartite_matching(const std::vector<std::vector<int>>& adjacency, int right_count,
                                        std::vector<int> initial) {
  const auto left_count = adjacency.size();
  std::vector<int> match_left = initial.empty() ? std::vector<int>(left_count, -1) : std::move(initial);
  if (match_left.size() != left_count) throw std::invalid_argument("initial matching size mismatch");
  std::vector<int> match_right(static_cast<std::size_t>(right_count), -1);
  for (std::size_t l = 0; l < left_count; ++l) {
    const int r = match_left[l];
    if (r < 0) continue;
    if (match_right[static_cast<std::size_t>(r)] >= 0) throw std::invalid_argument("initial matching not injective");
    match_right[static_cast<std::size_t>(r)] = static_cast<int>(l);
  }
  std::vector<char> visited(static_cast<std::size_t>(right_count));
  for (std::size_t l = 0; l < left_count; ++l) {
    if (match_left[l] >= 0) continue;
    std::fill(visited.begin(), visited.end(), 0);
    try_augment(static_cast<int>(l), adjacency, match_right, match_left, visited);
  }
  return match_left;
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight) {
  const int n = static_cast<int>(weight.rows());
  if (weight.cols() != n) throw std::invalid_argument("assignment needs a square weight matrix");
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Big-M cost for forbidden pairs so the O(n^3) potential method stays finite.
  double span = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::isfinite(weight(i, j))) span = std::max(span, std::abs(weight(i, j)));
  const double forbidden = 4.0 * span * (n + 1);

  auto cost = [&](int i, int j) { return std::isfinite(weight(i, j)) ? -weight(i, j) : forbidden; };

  // 1-based potentials, standard shortest augmenting path formulation.
  std::vector<double> u(static_cast<std::size_t>(n + 1)), v(static_cast<std::size_t>(n + 1));
  std::vector<int> p(static_cast<std::size_t>(n + 1)), way(static_cast<std::size_t>(n + 1));
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    const int i = p[static_cast<std::size_t>(j)];
    if (i > 0 && std::isfinite(weight(i - 1, j - 1))) row_to_col[static_cast<std::size_t>(i - 1)] = j - 1;
  }
  return row_to_col;
}

}  // namespace maryland
