#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "gnarl/graph.hpp"
#include "gnarl/mdp.hpp"

namespace testutil {

inline gnarl::Graph path_graph(int n, bool weighted = false) {
  std::vector<gnarl::Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  if (!weighted) return gnarl::Graph(n, e, false);
  return gnarl::Graph(n, e, false, std::vector<double>(e.size(), 1.0));
}

inline gnarl::Graph star_graph(int leaves) {
  std::vector<gnarl::Edge> e;
  for (int i = 1; i <= leaves; ++i) e.push_back({0, i});
  return gnarl::Graph(leaves + 1, e, false);
}

inline gnarl::Graph cycle_graph(int n, std::vector<double> w = {}) {
  std::vector<gnarl::Edge> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  if (w.empty()) return gnarl::Graph(n, e, false);
  return gnarl::Graph(n, e, false, w);
}

/// Relabels nodes: new id of v is perm[v]. Weights follow their edges.
inline gnarl::Graph permute(const gnarl::Graph& g, const std::vector<int>& perm) {
  std::vector<gnarl::Edge> e;
  std::vector<double> w;
  for (int k = 0; k < g.edge_count(); ++k) {
    e.push_back({perm[static_cast<std::size_t>(g.edge(k).u)], perm[static_cast<std::size_t>(g.edge(k).v)]});
    if (g.weighted()) w.push_back(g.weight(k));
  }
  std::optional<std::vector<double>> nw;
  if (g.node_weighted()) {
    nw = std::vector<double>(static_cast<std::size_t>(g.node_count()));
    for (int v = 0; v < g.node_count(); ++v) (*nw)[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] = g.node_weight(v);
  }
  return gnarl::Graph(g.node_count(), e, g.directed(),
                      g.weighted() ? std::optional<std::vector<double>>(w) : std::nullopt, nw);
}


/// Copy of `inst` whose v_s input points at `start`.
inline gnarl::Instance with_start(const gnarl::Instance& inst, int start) {
  auto inputs = std::make_shared<gnarl::FeatureStore>(*inst.inputs);
  auto& vs = inputs->values("v_s");
  std::fill(vs.begin(), vs.end(), 0.0);
  vs[static_cast<std::size_t>(start)] = 1.0;
  gnarl::Instance out = inst;
  out.inputs = inputs;
  return out;
}

/// Uniform over allowed actions.
inline gnarl::Policy uniform_policy(const gnarl::Environment& env) {
  return [&env](const gnarl::MdpState& s) {
    const auto m = env.mask(s);
    int k = 0;
    for (char c : m) k += c;
    std::vector<double> p(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) p[i] = 1.0 / k;
    return p;
  };
}


inline int start_of(const gnarl::Instance& inst) {
  const auto& vs = inst.inputs->values("v_s");
  return static_cast<int>(std::find(vs.begin(), vs.end(), 1.0) - vs.begin());
}


// Every predecessor array produced by some full DFS traversal: any restart root, any neighbour order.
inline std::set<std::vector<int>> dfs_outputs(const gnarl::Graph& g) {
  const int n = g.node_count();
  std::set<std::vector<int>> out;
  std::vector<int> pred(static_cast<std::size_t>(n));
  std::iota(pred.begin(), pred.end(), 0);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::function<void()> go = [&]() {
    if (stack.empty()) {
      bool any = false;
      for (int r = 0; r < n; ++r) {
        if (seen[static_cast<std::size_t>(r)]) continue;
        any = true;
        seen[static_cast<std::size_t>(r)] = 1;
        stack.push_back(r);
        go();
        stack.pop_back();
        seen[static_cast<std::size_t>(r)] = 0;
      }
      if (!any) out.insert(pred);
      return;
    }
    const int u = stack.back();
    bool any = false;
    for (int v : g.neighbors(u)) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      any = true;
      seen[static_cast<std::size_t>(v)] = 1;
      pred[static_cast<std::size_t>(v)] = u;
      stack.push_back(v);
      go();
      stack.pop_back();
      pred[static_cast<std::size_t>(v)] = v;
      seen[static_cast<std::size_t>(v)] = 0;
    }
    if (!any) {
      stack.pop_back();
      go();
      stack.push_back(u);
    }
  };
  go();
  return out;
}

inline gnarl::Graph from_bits(int n, std::uint32_t bits, bool directed) {
  std::vector<gnarl::Edge> e;
  int k = 0;
  for (int u = 0; u < n; ++u)
    for (int v = directed ? 0 : u + 1; v < n; ++v) {
      if (u == v) continue;
      if ((bits >> k++) & 1u) e.push_back({u, v});
    }
  return gnarl::Graph(n, e, directed);
}

}  // namespace testutil
