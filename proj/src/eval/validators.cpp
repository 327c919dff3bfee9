#include <algorithm>
#include <cmath>
#include <functional>

#include "gnarl/validators.hpp"

namespace gnarl {
namespace {

bool valid_pointers(const Graph& g, const std::vector<int>& pred) {
  if (static_cast<int>(pred.size()) != g.node_count()) return false;
  for (int p : pred)
    if (p < 0 || p >= g.node_count()) return false;
  return true;
}

// Each non-root must hang off an existing edge (pred_v -> v).
bool pointers_on_edges(const Graph& g, const std::vector<int>& pred) {
  for (int v = 0; v < g.node_count(); ++v) {
    const int p = pred[static_cast<std::size_t>(v)];
    if (p != v && !g.has_edge(p, v)) return false;
  }
  return true;
}

bool has_directed_cycle(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<int> colour(static_cast<std::size_t>(n), 0);
  std::function<bool(int)> visit = [&](int u) {
    colour[static_cast<std::size_t>(u)] = 1;
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (colour[static_cast<std::size_t>(v)] == 1) return true;
      if (colour[static_cast<std::size_t>(v)] == 0 && visit(v)) return true;
    }
    colour[static_cast<std::size_t>(u)] = 2;
    return false;
  };
  for (int u = 0; u < n; ++u)
    if (colour[static_cast<std::size_t>(u)] == 0 && visit(u)) return true;
  return false;
}

bool dfs_forest_recursive(const Graph& g, const std::vector<int>& pred, const std::vector<int>& active) {
  if (active.size() <= 1) return true;
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<char> in_active(n, 0);
  for (int v : active) in_active[static_cast<std::size_t>(v)] = 1;

  std::vector<int> subroots;
  std::vector<char> is_root(n, 0);
  for (int v : active) {
    const int p = pred[static_cast<std::size_t>(v)];
    if (!in_active[static_cast<std::size_t>(p)] || p == v) {
      subroots.push_back(v);
      is_root[static_cast<std::size_t>(v)] = 1;
    }
  }
  if (subroots.empty()) return false;

  // subroot_v by following pred inside the active set; a node that never meets a
  // subroot sits on a pred cycle and cannot belong to any DFS forest.
  std::vector<int> root_of(n, -1);
  for (int v : active) {
    int x = v;
    std::size_t hops = 0;
    while (!is_root[static_cast<std::size_t>(x)] && hops <= active.size()) {
      x = pred[static_cast<std::size_t>(x)];
      ++hops;
    }
    if (!is_root[static_cast<std::size_t>(x)]) return false;
    root_of[static_cast<std::size_t>(v)] = x;
  }

  if (subroots.size() > 1) {
    std::vector<int> slot(n, -1);
    for (std::size_t i = 0; i < subroots.size(); ++i) slot[static_cast<std::size_t>(subroots[i])] = static_cast<int>(i);
    std::vector<std::vector<int>> comp(subroots.size());
    auto link = [&](int u, int v) {
      const int ru = root_of[static_cast<std::size_t>(u)];
      const int rv = root_of[static_cast<std::size_t>(v)];
      if (ru != rv) comp[static_cast<std::size_t>(slot[static_cast<std::size_t>(ru)])].push_back(slot[static_cast<std::size_t>(rv)]);
    };
    for (const auto& e : g.edges()) {
      if (!in_active[static_cast<std::size_t>(e.u)] || !in_active[static_cast<std::size_t>(e.v)]) continue;
      link(e.u, e.v);
      if (!g.directed()) link(e.v, e.u);
    }
    if (has_directed_cycle(static_cast<int>(subroots.size()), comp)) return false;
  }

  for (int r : subroots) {
    std::vector<int> desc;
    for (int v : active)
      if (v != r && root_of[static_cast<std::size_t>(v)] == r) desc.push_back(v);
    if (!desc.empty() && !dfs_forest_recursive(g, pred, desc)) return false;
  }
  return true;
}

}  // namespace

bool check_bfs(const Graph& g, int start, const std::vector<int>& pred) {
  if (!valid_pointers(g, pred)) return false;
  const auto dist = bfs_distances(g, start);
  for (int v = 0; v < g.node_count(); ++v) {
    const int p = pred[static_cast<std::size_t>(v)];
    const int d = dist[static_cast<std::size_t>(v)];
    if (v == start || d < 0) {
      if (p != v) return false;
      continue;
    }
    // Depth along the pred chain equals the BFS distance iff every hop descends one level.
    if (p == v || !g.has_edge(p, v) || dist[static_cast<std::size_t>(p)] != d - 1) return false;
  }
  return true;
}

bool check_dfs(const Graph& g, const std::vector<int>& pred) {
  if (!valid_pointers(g, pred) || !pointers_on_edges(g, pred)) return false;
  std::vector<int> all(static_cast<std::size_t>(g.node_count()));
  for (int v = 0; v < g.node_count(); ++v) all[static_cast<std::size_t>(v)] = v;
  return dfs_forest_recursive(g, pred, all);
}

bool check_bellman_ford(const Graph& g, int start, const std::vector<int>& pred, double tol) {
  if (!valid_pointers(g, pred) || !pointers_on_edges(g, pred)) return false;
  const auto ref = shortest_distances(g, start);
  const int n = g.node_count();
  for (int v = 0; v < n; ++v) {
    if (v == start || std::isinf(ref[static_cast<std::size_t>(v)])) {
      if (pred[static_cast<std::size_t>(v)] != v) return false;
      continue;
    }
    double len = 0.0;
    int x = v;
    int hops = 0;
    while (x != start && hops < n) {
      const int p = pred[static_cast<std::size_t>(x)];
      if (p == x) return false;
      len += g.weighted() ? g.weight(p, x) : 1.0;
      x = p;
      ++hops;
    }
    if (x != start) return false;
    if (std::abs(len - ref[static_cast<std::size_t>(v)]) > tol * std::max(1.0, ref[static_cast<std::size_t>(v)])) return false;
  }
  return true;
}

bool check_mst(const Graph& g, const std::vector<int>& pred, double tol) {
  if (!valid_pointers(g, pred) || !pointers_on_edges(g, pred)) return false;
  const int n = g.node_count();
  const auto comp = components(g);
  std::vector<int> roots_in(static_cast<std::size_t>(n), 0);
  double total = 0.0;
  for (int v = 0; v < n; ++v) {
    const int p = pred[static_cast<std::size_t>(v)];
    if (p == v) {
      ++roots_in[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];
    } else {
      total += g.weighted() ? g.weight(p, v) : 1.0;
    }
    // Chains must end at a root; otherwise pred contains a cycle.
    int x = v;
    int hops = 0;
    while (pred[static_cast<std::size_t>(x)] != x && hops <= n) {
      x = pred[static_cast<std::size_t>(x)];
      ++hops;
    }
    if (pred[static_cast<std::size_t>(x)] != x) return false;
  }
  for (int v = 0; v < n; ++v)
    if (comp[static_cast<std::size_t>(v)] == v && roots_in[static_cast<std::size_t>(v)] != 1) return false;
  const double ref = msf_weight(g);
  return std::abs(total - ref) <= tol * std::max(1.0, ref);
}

bool is_hamiltonian_successor(const std::vector<int>& next) {
  const int n = static_cast<int>(next.size());
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  int x = 0;
  for (int k = 0; k < n; ++k) {
    if (x < 0 || x >= n || seen[static_cast<std::size_t>(x)]) return false;
    seen[static_cast<std::size_t>(x)] = 1;
    x = next[static_cast<std::size_t>(x)];
  }
  return x == 0;
}

double tour_length(const Graph& g, const std::vector<int>& tour) {
  double total = 0.0;
  for (std::size_t i = 0; i < tour.size(); ++i) {
    const int a = tour[i];
    const int b = tour[(i + 1) % tour.size()];
    if (a != b) total += g.weight(a, b);
  }
  return total;
}

bool is_vertex_cover(const Graph& g, const std::vector<char>& in_cover) {
  for (const auto& e : g.edges())
    if (!in_cover[static_cast<std::size_t>(e.u)] && !in_cover[static_cast<std::size_t>(e.v)]) return false;
  return true;
}

double cover_weight(const Graph& g, const std::vector<char>& in_cover) {
  double total = 0.0;
  for (int v = 0; v < g.node_count(); ++v)
    if (in_cover[static_cast<std::size_t>(v)]) total += g.node_weighted() ? g.node_weight(v) : 1.0;
  return total;
}

}  // namespace gnarl
