#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gnarl {

struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable weighted graph on nodes 0..n-1.
///
/// Undirected graphs store each edge once as (min, max); adjacency queries are
/// symmetric. Edges are kept sorted so equal edge sets compare equal. Optional
/// edge weights are aligned with edges(); optional node weights with nodes.
class Graph {
 public:
  Graph() = default;
  Graph(int node_count, std::vector<Edge> edges, bool directed,
        std::optional<std::vector<double>> weights = std::nullopt,
        std::optional<std::vector<double>> node_weights = std::nullopt);

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  bool directed() const { return directed_; }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

  /// Index into edges() or -1. For undirected graphs the order of u, v is irrelevant.
  int edge_index(int u, int v) const {
    return index_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v)];
  }
  bool has_edge(int u, int v) const { return edge_index(u, v) >= 0; }

  /// Out-neighbours (all neighbours when undirected), ascending.
  std::span<const int> neighbors(int v) const {
    return {adj_.data() + offsets_[static_cast<std::size_t>(v)],
            adj_.data() + offsets_[static_cast<std::size_t>(v) + 1]};
  }
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

  bool weighted() const { return weights_.has_value(); }
  const std::optional<std::vector<double>>& weights() const { return weights_; }
  double weight(int e) const;
  double weight(int u, int v) const;

  bool node_weighted() const { return node_weights_.has_value(); }
  const std::optional<std::vector<double>>& node_weights() const { return node_weights_; }
  double node_weight(int v) const;

  Graph with_edge(int u, int v, double weight = 1.0) const;
  Graph with_weights(std::vector<double> weights) const;
  Graph with_node_weights(std::vector<double> node_weights) const;

  bool connected() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.directed_ == b.directed_ && a.edges_ == b.edges_ &&
           a.weights_ == b.weights_ && a.node_weights_ == b.node_weights_;
  }

 private:
  int n_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::optional<std::vector<double>> weights_;
  std::optional<std::vector<double>> node_weights_;
  std::vector<int> index_;
  std::vector<int> offsets_;
  std::vector<int> adj_;
};

// Generators. All take explicit seeds and are deterministic across platforms.

/// Erdos-Renyi G(n, p): each unordered (ordered, if directed) pair independently.
Graph generate_er(int n, double p, std::uint64_t seed, bool directed = false);

/// Barabasi-Albert: complete seed graph on m nodes, then every new node attaches
/// to m distinct existing nodes with degree-proportional probability.
Graph generate_ba(int n, int m, std::uint64_t seed);

Graph complete_graph(int n);

/// Complete graph over uniform points in the unit square, Euclidean weights.
Graph generate_euclidean_complete(int n, std::uint64_t seed);

/// Edge weights drawn uniformly from (0, 1].
Graph with_uniform_weights(const Graph& g, std::uint64_t seed);
Graph with_uniform_node_weights(const Graph& g, std::uint64_t seed);

// Dataset persistence.

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Writes graphs as line-oriented text; a ".gz" suffix selects gzip output.
void save_dataset(const std::vector<Graph>& graphs, const std::filesystem::path& path);

/// Reads plain or gzip-compressed datasets. Throws DatasetError on malformed input.
std::vector<Graph> load_dataset(const std::filesystem::path& path);

std::string serialize_dataset(const std::vector<Graph>& graphs);

/// Whole-file text IO shared by every on-disk format; ".gz" paths go through zlib.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::vector<Graph> parse_dataset(const std::string& text);

}  // namespace gnarl
