#include <cmath>
#include <numeric>

#include "gnarl/rng.hpp"
#include "gnarl/validators.hpp"

namespace gnarl {
namespace {

// Union-find over nodes re-inserted in reverse removal order.
struct Components {
  std::vector<int> parent;
  int count = 0;
  explicit Components(int n) : parent(static_cast<std::size_t>(n), -1) {}
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void insert(int x) {
    parent[static_cast<std::size_t>(x)] = x;
    ++count;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --count;
    }
  }
};

bool connected_without(const Graph& g, const std::vector<char>& removed, int remaining) {
  if (remaining <= 1) return true;
  const int n = g.node_count();
  int start = 0;
  while (removed[static_cast<std::size_t>(start)]) ++start;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : g.neighbors(u)) {
      if (!removed[static_cast<std::size_t>(v)] && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == remaining;
}

}  // namespace

double critical_fraction(const Graph& g, const std::vector<int>& order) {
  const int n = g.node_count();
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("critical_fraction: order must list every node");
  // comps[j]: component count of the subgraph induced by the last j nodes of the order.
  std::vector<int> comps(static_cast<std::size_t>(n) + 1, 0);
  Components cs(n);
  for (int j = 1; j <= n; ++j) {
    const int x = order[static_cast<std::size_t>(n - j)];
    cs.insert(x);
    for (int y : g.neighbors(x))
      if (cs.parent[static_cast<std::size_t>(y)] >= 0) cs.unite(x, y);
    comps[static_cast<std::size_t>(j)] = cs.count;
  }
  if (comps[static_cast<std::size_t>(n)] > 1) return 1.0 / n;
  for (int k = 1; n - k >= 2; ++k)
    if (comps[static_cast<std::size_t>(n - k)] > 1) return static_cast<double>(k) / n;
  return static_cast<double>(n - 1) / n;
}

double critical_fraction_targeted(const Graph& g) {
  const int n = g.node_count();
  std::vector<char> removed(static_cast<std::size_t>(n), 0);
  if (!connected_without(g, removed, n)) return 1.0 / n;
  std::vector<int> degree(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) degree[static_cast<std::size_t>(v)] = g.degree(v);
  for (int k = 1; n - k >= 2; ++k) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (!removed[static_cast<std::size_t>(v)] && (best < 0 || degree[static_cast<std::size_t>(v)] > degree[static_cast<std::size_t>(best)]))
        best = v;
    removed[static_cast<std::size_t>(best)] = 1;
    for (int y : g.neighbors(best)) --degree[static_cast<std::size_t>(y)];
    if (!connected_without(g, removed, n - k)) return static_cast<double>(k) / n;
  }
  return static_cast<double>(n - 1) / n;
}

RobustnessEstimate critical_fraction_random(const Graph& g, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("critical_fraction_random: samples must be positive");
  const int n = g.node_count();
  Rng rng(seed);
  std::vector<int> order(static_cast<std::size_t>(n));
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const double xi = critical_fraction(g, order);
    sum += xi;
    sum_sq += xi * xi;
  }
  RobustnessEstimate est;
  est.mean = sum / samples;
  if (samples > 1) {
    const double var = std::max(0.0, (sum_sq - samples * est.mean * est.mean) / (samples - 1));
    est.std_error = std::sqrt(var / samples);
  }
  return est;
}

double robustness(const Graph& g, RemovalStrategy strategy, int samples, std::uint64_t seed) {
  return strategy == RemovalStrategy::targeted ? critical_fraction_targeted(g)
                                               : critical_fraction_random(g, samples, seed).mean;
}

}  // namespace gnarl
