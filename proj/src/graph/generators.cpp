#include <algorithm>
#include <cmath>

#include "gnarl/graph.hpp"
#include "gnarl/rng.hpp"

namespace gnarl {

Graph generate_er(int n, double p, std::uint64_t seed, bool directed) {
  if (n < 1) throw std::invalid_argument("generate_er: n must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("generate_er: p must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = directed ? 0 : u + 1; v < n; ++v) {
      if (u == v) continue;
      if (rng.bernoulli(p)) edges.push_back({u, v});
    }
  }
  return Graph(n, std::move(edges), directed);
}

Graph generate_ba(int n, int m, std::uint64_t seed) {
  if (m < 1 || m >= n) throw std::invalid_argument("generate_ba: requires 1 <= m < n");
  Rng rng(seed);
  std::vector<Edge> edges;
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) {
      edges.push_back({u, v});
      degree[static_cast<std::size_t>(u)] += 1.0;
      degree[static_cast<std::size_t>(v)] += 1.0;
    }
  }
  for (int t = m; t < n; ++t) {
    std::vector<double> w(degree.begin(), degree.begin() + t);
    bool any_positive = false;
    for (double d : w) any_positive = any_positive || d > 0.0;
    if (!any_positive) std::fill(w.begin(), w.end(), 1.0);
    std::vector<int> targets;
    for (int k = 0; k < m; ++k) {
      double total = 0.0;
      for (double x : w) total += x;
      if (!(total > 0.0)) {
        // Remaining candidates all have degree zero; fall back to uniform.
        for (int i = 0; i < t; ++i)
          if (std::find(targets.begin(), targets.end(), i) == targets.end()) w[static_cast<std::size_t>(i)] = 1.0;
      }
      const auto pick = static_cast<int>(rng.categorical(w));
      targets.push_back(pick);
      w[static_cast<std::size_t>(pick)] = 0.0;
    }
    for (int s : targets) {
      edges.push_back({s, t});
      degree[static_cast<std::size_t>(s)] += 1.0;
      degree[static_cast<std::size_t>(t)] += 1.0;
    }
  }
  return Graph(n, std::move(edges), false);
}

Graph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
  return Graph(n, std::move(edges), false);
}

Graph generate_euclidean_complete(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = rng.uniform();
    ys[static_cast<std::size_t>(i)] = rng.uniform();
  }
  std::vector<Edge> edges;
  std::vector<double> w;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      edges.push_back({u, v});
      const double dx = xs[static_cast<std::size_t>(u)] - xs[static_cast<std::size_t>(v)];
      const double dy = ys[static_cast<std::size_t>(u)] - ys[static_cast<std::size_t>(v)];
      // Coincident points would give a zero weight, indistinguishable from "no edge".
      w.push_back(std::max(std::sqrt(dx * dx + dy * dy), 1e-9));
    }
  }
  return Graph(n, std::move(edges), false, std::move(w));
}

Graph with_uniform_weights(const Graph& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(static_cast<std::size_t>(g.edge_count()));
  for (auto& x : w) x = rng.uniform_open_closed();
  return g.with_weights(std::move(w));
}

Graph with_uniform_node_weights(const Graph& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(static_cast<std::size_t>(g.node_count()));
  for (auto& x : w) x = rng.uniform_open_closed();
  return g.with_node_weights(std::move(w));
}

}  // namespace gnarl
