#include <limits>

#include "gnarl/oracles.hpp"

namespace gnarl {

std::vector<int> tsp_exact_tour(const Graph& g) {
  const int n = g.node_count();
  if (n > kTspExactMaxNodes)
    throw std::invalid_argument("tsp_exact_tour: refusing n = " + std::to_string(n) + " (limit " +
                                std::to_string(kTspExactMaxNodes) + ")");
  if (n <= 2) {
    std::vector<int> t;
    for (int v = 0; v < n; ++v) t.push_back(v);
    return t;
  }
  auto w = [&](int a, int b) { return g.weight(a, b); };

  // Node 0 is the fixed start; bit i-1 of S marks node i as visited.
  // cost[S][j]: cheapest completion from j, having visited S, through the rest and back to 0.
  const int m = n - 1;
  const std::size_t states = std::size_t{1} << m;
  const std::size_t full = states - 1;
  std::vector<double> cost(states * static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  auto at = [&](std::size_t S, int j) -> double& { return cost[S * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; };

  for (int j = 1; j < n; ++j) at(full, j) = w(j, 0);
  for (std::size_t S = full; S-- > 0;) {
    for (int j = 0; j < n; ++j) {
      if (j == 0 ? S != 0 : !(S >> (j - 1) & 1)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (int k = 1; k < n; ++k) {
        if (S >> (k - 1) & 1) continue;
        const double c = w(j, k) + at(S | (std::size_t{1} << (k - 1)), k);
        if (c < best) best = c;
      }
      at(S, j) = best;
    }
  }

  // Walk forward taking the lowest-index step that stays within tolerance of optimal.
  std::vector<int> tour{0};
  std::size_t S = 0;
  int j = 0;
  while (static_cast<int>(tour.size()) < n) {
    const double target = at(S, j);
    const double tol = 1e-9 * std::max(1.0, target);
    int pick = -1;
    for (int k = 1; k < n && pick < 0; ++k) {
      if (S >> (k - 1) & 1) continue;
      if (w(j, k) + at(S | (std::size_t{1} << (k - 1)), k) <= target + tol) pick = k;
    }
    S |= std::size_t{1} << (pick - 1);
    j = pick;
    tour.push_back(pick);
  }
  return tour;
}

}  // namespace gnarl
