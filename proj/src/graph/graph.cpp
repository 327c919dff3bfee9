#include <algorithm>
#include <numeric>
#include <queue>

#include "gnarl/graph.hpp"

namespace gnarl {

Graph::Graph(int node_count, std::vector<Edge> edges, bool directed,
             std::optional<std::vector<double>> weights,
             std::optional<std::vector<double>> node_weights)
    : n_(node_count), directed_(directed) {
  if (node_count < 1) throw std::invalid_argument("Graph: node_count must be positive");
  if (weights && weights->size() != edges.size())
    throw std::invalid_argument("Graph: weight count does not match edge count");
  if (node_weights && node_weights->size() != static_cast<std::size_t>(node_count))
    throw std::invalid_argument("Graph: node weight count does not match node count");

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_)
      throw std::invalid_argument("Graph: edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("Graph: self-loops are not supported");
    if (!directed_ && e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  edges_.reserve(edges.size());
  std::vector<double> sorted_weights;
  for (std::size_t i : order) {
    if (!edges_.empty() && edges_.back() == edges[i])
      throw std::invalid_argument("Graph: duplicate edge");
    edges_.push_back(edges[i]);
    if (weights) sorted_weights.push_back((*weights)[i]);
  }
  if (weights) weights_ = std::move(sorted_weights);
  node_weights_ = std::move(node_weights);

  const auto n = static_cast<std::size_t>(n_);
  index_.assign(n * n, -1);
  std::vector<std::vector<int>> lists(n);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    index_[static_cast<std::size_t>(u) * n + static_cast<std::size_t>(v)] = static_cast<int>(e);
    lists[static_cast<std::size_t>(u)].push_back(v);
    if (!directed_) {
      index_[static_cast<std::size_t>(v) * n + static_cast<std::size_t>(u)] = static_cast<int>(e);
      lists[static_cast<std::size_t>(v)].push_back(u);
    }
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(lists[v].begin(), lists[v].end());
    offsets_[v + 1] = offsets_[v] + static_cast<int>(lists[v].size());
  }
  adj_.reserve(static_cast<std::size_t>(offsets_[n]));
  for (auto& l : lists) adj_.insert(adj_.end(), l.begin(), l.end());
}

double Graph::weight(int e) const {
  if (!weights_) throw std::logic_error("Graph::weight: graph is unweighted");
  return (*weights_)[static_cast<std::size_t>(e)];
}

double Graph::weight(int u, int v) const {
  const int e = edge_index(u, v);
  if (e < 0) throw std::out_of_range("Graph::weight: no such edge");
  return weight(e);
}

double Graph::node_weight(int v) const {
  if (!node_weights_) throw std::logic_error("Graph::node_weight: graph has no node weights");
  return (*node_weights_)[static_cast<std::size_t>(v)];
}

Graph Graph::with_edge(int u, int v, double w) const {
  std::vector<Edge> e(edges_.begin(), edges_.end());
  e.push_back({u, v});
  std::optional<std::vector<double>> ws;
  if (weights_) {
    ws = *weights_;
    ws->push_back(w);
  }
  return Graph(n_, std::move(e), directed_, std::move(ws), node_weights_);
}

Graph Graph::with_weights(std::vector<double> weights) const {
  return Graph(n_, edges_, directed_, std::move(weights), node_weights_);
}

Graph Graph::with_node_weights(std::vector<double> node_weights) const {
  return Graph(n_, edges_, directed_, weights_, std::move(node_weights));
}

bool Graph::connected() const {
  // Weak connectivity for directed graphs.
  std::vector<std::vector<int>> undirected(static_cast<std::size_t>(n_));
  for (const auto& e : edges_) {
    undirected[static_cast<std::size_t>(e.u)].push_back(e.v);
    undirected[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    for (int y : undirected[static_cast<std::size_t>(x)]) {
      if (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = 1;
        ++count;
        q.push(y);
      }
    }
  }
  return count == n_;
}

}  // namespace gnarl
