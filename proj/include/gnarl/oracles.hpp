#pragma once

#include <stdexcept>
#include <vector>

#include "gnarl/mdp.hpp"

namespace gnarl {

class Environment;

class ExpertError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Expert action distributions over all nodes, uniform over their support.

std::vector<double> expert_bfs(const MdpState& s);
std::vector<double> expert_dfs(const MdpState& s);
std::vector<double> expert_bellman_ford(const MdpState& s);
std::vector<double> expert_mst_prim(const MdpState& s);
/// Mass 1 on the successor of the current head in `tour`, rotated to start at v_s.
std::vector<double> tsp_expert_from_tour(const std::vector<int>& tour, const MdpState& s);
/// Uniform over the optimal cover nodes not yet selected.
std::vector<double> mvc_expert(const std::vector<int>& optimal_cover, const MdpState& s);

/// Expert policy for one instance; TSP and MVC solve the instance exactly up front.
Policy make_expert_policy(const Environment& env, const Instance& inst);

// Exact oracles.

inline constexpr int kTspExactMaxNodes = 16;
inline constexpr int kMvcExactMaxNodes = 24;

/// Minimum-cost Hamiltonian cycle starting at node 0 (Held-Karp). Among tours within
/// 1e-9 of the optimum the lexicographically smallest is returned.
std::vector<int> tsp_exact_tour(const Graph& g);

/// Minimum-weight vertex cover as a sorted node list (branch and bound); ties go to the
/// lexicographically smallest list. Unweighted graphs use unit weights.
std::vector<int> mvc_exact_cover(const Graph& g);

/// Primal-dual parallel approximation with ratio 2/(1 - eps).
std::vector<int> mvc_approx(const Graph& g, double eps = 0.1);

// Weak experts.

/// Allowed action with the largest one-step reward, lowest index on ties.
/// RGC scores complete edges: phase 1 returns the first endpoint of the best edge,
/// phase 2 the best partner for psi_1.
int weak_expert_action(const Environment& env, const MdpState& s);

/// MVC alternative: most uncovered incident edges per unit weight.
int mvc_coverage_greedy_action(const MdpState& s);

/// One-hot distribution over weak_expert_action.
Policy make_weak_expert_policy(const Environment& env);

}  // namespace gnarl
