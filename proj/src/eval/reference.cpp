#include <algorithm>
#include <numeric>
#include <queue>

#include "gnarl/validators.hpp"

namespace gnarl {

std::vector<int> bfs_distances(const Graph& g, int source) {
  std::vector<int> dist(static_cast<std::size_t>(g.node_count()), -1);
  std::queue<int> q;
  dist[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : g.neighbors(u)) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

std::vector<double> shortest_distances(const Graph& g, int source) {
  std::vector<double> dist(static_cast<std::size_t>(g.node_count()), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(source)] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (int v : g.neighbors(u)) {
      const double nd = d + (g.weighted() ? g.weight(u, v) : 1.0);
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        pq.push({nd, v});
      }
    }
  }
  return dist;
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    return true;
  }
};

}  // namespace

double msf_weight(const Graph& g) {
  std::vector<int> order(static_cast<std::size_t>(g.edge_count()));
  std::iota(order.begin(), order.end(), 0);
  auto w = [&](int e) { return g.weighted() ? g.weight(e) : 1.0; };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w(a) < w(b); });
  DisjointSets ds(g.node_count());
  double total = 0.0;
  for (int e : order)
    if (ds.unite(g.edge(e).u, g.edge(e).v)) total += w(e);
  return total;
}

std::vector<int> components(const Graph& g) {
  DisjointSets ds(g.node_count());
  for (const auto& e : g.edges()) ds.unite(e.u, e.v);
  std::vector<int> label(static_cast<std::size_t>(g.node_count()));
  for (int v = 0; v < g.node_count(); ++v) label[static_cast<std::size_t>(v)] = ds.find(v);
  return label;
}

}  // namespace gnarl
