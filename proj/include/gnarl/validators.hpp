#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "gnarl/graph.hpp"

namespace gnarl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Reference solvers, independent of the environments.

/// Hop distances from `source` by queue-based BFS; -1 for unreachable nodes.
std::vector<int> bfs_distances(const Graph& g, int source);

/// Dijkstra distances (non-negative weights); +inf for unreachable nodes.
std::vector<double> shortest_distances(const Graph& g, int source);

/// Kruskal minimum spanning forest weight.
double msf_weight(const Graph& g);

/// Weakly connected component label per node.
std::vector<int> components(const Graph& g);

// Solution validators. Unreached nodes are expected to point to themselves.

bool check_bfs(const Graph& g, int start, const std::vector<int>& pred);
bool check_dfs(const Graph& g, const std::vector<int>& pred);
bool check_bellman_ford(const Graph& g, int start, const std::vector<int>& pred, double tol = 1e-9);
bool check_mst(const Graph& g, const std::vector<int>& pred, double tol = 1e-9);

/// True iff `order` is a Hamiltonian cycle given as a successor array (pred in the TSP schema).
bool is_hamiltonian_successor(const std::vector<int>& next);
double tour_length(const Graph& g, const std::vector<int>& tour);
bool is_vertex_cover(const Graph& g, const std::vector<char>& in_cover);
double cover_weight(const Graph& g, const std::vector<char>& in_cover);

// Robustness.

enum class RemovalStrategy { random, targeted };

/// Fraction of nodes removed in `order` before the remainder (of at least two nodes)
/// disconnects; (n-1)/n if it never does and 1/n for an already disconnected graph.
double critical_fraction(const Graph& g, const std::vector<int>& order);

/// Highest-current-degree-first removal, ties to the lowest index.
double critical_fraction_targeted(const Graph& g);

struct RobustnessEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// F(G): mean critical fraction over `samples` uniform removal orders drawn from `seed`.
/// Equal seeds give the same orders for graphs with equal node count (common random numbers).
RobustnessEstimate critical_fraction_random(const Graph& g, int samples, std::uint64_t seed);

double robustness(const Graph& g, RemovalStrategy strategy, int samples, std::uint64_t seed);

}  // namespace gnarl
