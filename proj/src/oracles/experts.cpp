#include <algorithm>
#include <limits>

#include "gnarl/environments.hpp"
#include "gnarl/oracles.hpp"

namespace gnarl {
namespace {

std::vector<double> uniform_over(const std::vector<int>& support, int n, const char* who) {
  if (support.empty()) throw ExpertError(std::string(who) + ": no eligible action (terminal state?)");
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  for (int v : support) p[static_cast<std::size_t>(v)] = 1.0 / static_cast<double>(support.size());
  return p;
}

bool reached(const MdpState& s, int v) { return s.state.node("reach", v) == 1.0; }

// Length of the pred chain from v to its root; -1 if the chain does not terminate.
int chain_depth(const MdpState& s, int v) {
  const auto& pred = s.state.values("pred");
  int depth = 0;
  int x = v;
  while (static_cast<int>(pred[static_cast<std::size_t>(x)]) != x) {
    x = static_cast<int>(pred[static_cast<std::size_t>(x)]);
    if (++depth > s.node_count()) return -1;
  }
  return depth;
}

}  // namespace

std::vector<double> expert_bfs(const MdpState& s) {
  const int n = s.node_count();
  std::vector<int> support;
  if (s.phase() == 1) {
    // Frontier parents are reached nodes with unreached neighbours. Before anything is
    // reached, v_s is the only candidate (depth 0; all other depths are infinite).
    int best = std::numeric_limits<int>::max();
    bool any_reached = false;
    for (int v = 0; v < n; ++v) {
      if (!reached(s, v)) continue;
      any_reached = true;
      bool open = false;
      for (int u : s.g().neighbors(v)) open = open || !reached(s, u);
      if (!open) continue;
      const int d = chain_depth(s, v);
      if (d < best) {
        best = d;
        support.clear();
      }
      if (d == best) support.push_back(v);
    }
    if (!any_reached && s.g().degree(s.context->start) > 0) support.push_back(s.context->start);
    return uniform_over(support, n, "expert_bfs");
  }
  const int u = selected_node(s, 1);
  for (int v : s.g().neighbors(u))
    if (v != u && !reached(s, v)) support.push_back(v);
  return uniform_over(support, n, "expert_bfs");
}

std::vector<double> expert_dfs(const MdpState& s) {
  const int n = s.node_count();
  std::vector<int> support;
  if (s.phase() == 1) {
    std::vector<int> colour(static_cast<std::size_t>(n));
    std::vector<int> depth(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
      if (!reached(s, v)) {
        colour[static_cast<std::size_t>(v)] = 0;
        continue;
      }
      bool all = true;
      for (int u : s.g().neighbors(v)) all = all && reached(s, u);
      colour[static_cast<std::size_t>(v)] = all ? 2 : 1;
      depth[static_cast<std::size_t>(v)] = chain_depth(s, v);
    }
    int d_max = -1;
    for (int v = 0; v < n; ++v)
      if (colour[static_cast<std::size_t>(v)] != 2) d_max = std::max(d_max, depth[static_cast<std::size_t>(v)]);
    for (int want : {1, 0}) {
      for (int v = 0; v < n; ++v)
        if (colour[static_cast<std::size_t>(v)] == want && depth[static_cast<std::size_t>(v)] == d_max) support.push_back(v);
      if (!support.empty()) break;
    }
    return uniform_over(support, n, "expert_dfs");
  }
  const int u = selected_node(s, 1);
  for (int v : s.g().neighbors(u))
    if (v != u && !reached(s, v)) support.push_back(v);
  if (support.empty() && !reached(s, u)) support.push_back(u);
  return uniform_over(support, n, "expert_dfs");
}

namespace {

std::vector<int> bellman_ford_candidates(const MdpState& s, int u) {
  std::vector<int> out;
  const double du = s.state.node("d", u);
  for (int v : s.g().neighbors(u)) {
    if (v == u) continue;
    if (du + s.g().weight(u, v) < s.state.node("d", v) || s.state.node("mask", v) == 0.0) out.push_back(v);
  }
  return out;
}

std::vector<int> prim_candidates(const MdpState& s, int u) {
  std::vector<int> out;
  for (int v : s.g().neighbors(u)) {
    if (v == u || s.state.node("mark", v) != 0.0) continue;
    if (s.state.node("key", v) > s.g().weight(u, v) || s.state.node("in_queue", v) == 0.0) out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<double> expert_bellman_ford(const MdpState& s) {
  const int n = s.node_count();
  if (s.phase() == 2) return uniform_over(bellman_ford_candidates(s, selected_node(s, 1)), n, "expert_bellman_ford");
  std::vector<int> support;
  bool any_visited = false;
  for (int v = 0; v < n; ++v) {
    if (s.state.node("mask", v) != 1.0) continue;
    any_visited = true;
    if (!bellman_ford_candidates(s, v).empty()) support.push_back(v);
  }
  if (!any_visited) support.push_back(s.context->start);
  return uniform_over(support, n, "expert_bellman_ford");
}

std::vector<double> expert_mst_prim(const MdpState& s) {
  const int n = s.node_count();
  if (s.phase() == 2) return uniform_over(prim_candidates(s, selected_node(s, 1)), n, "expert_mst_prim");
  const int psi = selected_node(s, 1);
  if (psi < 0) return uniform_over({s.context->start}, n, "expert_mst_prim");
  if (!prim_candidates(s, psi).empty()) return uniform_over({psi}, n, "expert_mst_prim");
  std::vector<int> queue;
  for (int v = 0; v < n; ++v)
    if (s.state.node("in_queue", v) == 1.0) queue.push_back(v);
  std::stable_sort(queue.begin(), queue.end(),
                   [&](int a, int b) { return s.state.node("key", a) < s.state.node("key", b); });
  for (int u : queue)
    if (!prim_candidates(s, u).empty()) return uniform_over({u}, n, "expert_mst_prim");
  // Only useless queue entries remain: extract the minimum as Prim would.
  if (!queue.empty()) return uniform_over({queue.front()}, n, "expert_mst_prim");
  throw ExpertError("expert_mst_prim: no eligible action (terminal state?)");
}

std::vector<double> tsp_expert_from_tour(const std::vector<int>& tour, const MdpState& s) {
  const int n = s.node_count();
  if (static_cast<int>(tour.size()) != n) throw ExpertError("tsp expert: tour does not cover the graph");
  if (s.t >= n) throw ExpertError("tsp expert: tour already complete");
  const int start = s.context->start;
  const auto it = std::find(tour.begin(), tour.end(), start);
  if (it == tour.end()) throw ExpertError("tsp expert: v_s missing from tour");
  const auto offset = static_cast<std::size_t>(it - tour.begin());
  const int next = tour[(offset + static_cast<std::size_t>(s.t)) % tour.size()];
  if (s.state.node("in_tour", next) != 0.0) throw ExpertError("tsp expert: state diverged from the oracle tour");
  return uniform_over({next}, n, "tsp expert");
}

std::vector<double> mvc_expert(const std::vector<int>& optimal_cover, const MdpState& s) {
  std::vector<int> support;
  for (int v : optimal_cover)
    if (s.state.node("in_cover", v) == 0.0) support.push_back(v);
  return uniform_over(support, s.node_count(), "mvc expert");
}

Policy make_expert_policy(const Environment& env, const Instance& inst) {
  const auto name = env.name();
  if (name == "bfs") return expert_bfs;
  if (name == "dfs") return expert_dfs;
  if (name == "bellman_ford") return expert_bellman_ford;
  if (name == "mst_prim") return expert_mst_prim;
  if (name == "tsp") {
    auto tour = tsp_exact_tour(*inst.graph);
    return [tour](const MdpState& s) { return tsp_expert_from_tour(tour, s); };
  }
  if (name == "mvc") {
    auto cover = mvc_exact_cover(*inst.graph);
    return [cover](const MdpState& s) { return mvc_expert(cover, s); };
  }
  throw ExpertError("no expert policy for environment '" + name + "'");
}

}  // namespace gnarl
