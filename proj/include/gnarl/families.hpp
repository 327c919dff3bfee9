#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnarl/graph.hpp"

namespace gnarl {

/// A random graph distribution used for training, validation and test splits.
struct GraphFamily {
  std::string kind = "er";  // er | ba | euclidean
  std::vector<int> sizes{16};
  double p_lo = 0.5, p_hi = 0.5;  // er: edge probability drawn uniformly per graph
  int m_lo = 2, m_hi = 2;         // ba: attachment count drawn uniformly per graph, capped at n-1
  bool connected = false;         // er: resample until connected
  bool directed = false;

  friend bool operator==(const GraphFamily&, const GraphFamily&) = default;
};

/// Throws std::invalid_argument for an unknown kind or empty/invalid parameters.
void validate(const GraphFamily& f);

/// Graph i has size sizes[i mod |sizes|] and is drawn from derive_seed(seed, i).
std::vector<Graph> sample_graphs(const GraphFamily& f, int count, std::uint64_t seed);
Graph sample_graph(const GraphFamily& f, int n, std::uint64_t seed);

}  // namespace gnarl
