#include <limits>

#include "gnarl/environments.hpp"
#include "gnarl/oracles.hpp"

namespace gnarl {
namespace {

struct ScoredEdge {
  int u = -1;
  int v = -1;
  double gain = -std::numeric_limits<double>::infinity();
};

// Best addable edge by robustness gain, scanning pairs in lexicographic order.
ScoredEdge best_rgc_edge(const RgcEnvironment& env, const MdpState& s, int only_u) {
  const Graph& g = s.g();
  const int n = g.node_count();
  const double base = env.robustness_of(g, *s.context);
  ScoredEdge best;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v || g.has_edge(u, v)) continue;
      if (only_u >= 0 ? u != only_u : v < u) continue;
      const double gain = env.robustness_of(g.with_edge(u, v), *s.context) - base;
      if (gain > best.gain) best = {u, v, gain};
    }
  }
  return best;
}

}  // namespace

int weak_expert_action(const Environment& env, const MdpState& s) {
  const auto m = env.mask(s);
  if (const auto* rgc = dynamic_cast<const RgcEnvironment*>(&env)) {
    if (s.phase() == 1) {
      const auto e = best_rgc_edge(*rgc, s, -1);
      if (e.u < 0) throw ExpertError("weak expert: no addable edge");
      return e.u;
    }
    const auto e = best_rgc_edge(*rgc, s, selected_node(s, 1));
    if (e.v < 0) throw ExpertError("weak expert: no addable edge for psi_1");
    return e.v;
  }
  int best = -1;
  double best_r = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < s.node_count(); ++a) {
    if (!m[static_cast<std::size_t>(a)]) continue;
    const double r = step(env, s, a).reward;
    if (r > best_r) {
      best_r = r;
      best = a;
    }
  }
  if (best < 0) throw ExpertError("weak expert: no allowed action");
  return best;
}

int mvc_coverage_greedy_action(const MdpState& s) {
  const Graph& g = s.g();
  const auto& cover = s.state.values("in_cover");
  const auto& w = s.inputs->values("w");
  int best = -1;
  double best_score = -1.0;
  for (int v = 0; v < g.node_count(); ++v) {
    if (cover[static_cast<std::size_t>(v)] == 1.0) continue;
    int uncovered = 0;
    for (int u : g.neighbors(v)) uncovered += cover[static_cast<std::size_t>(u)] == 0.0;
    const double score = uncovered / w[static_cast<std::size_t>(v)];
    if (score > best_score) {
      best_score = score;
      best = v;
    }
  }
  if (best < 0) throw ExpertError("coverage greedy: no allowed action");
  return best;
}

Policy make_weak_expert_policy(const Environment& env) {
  return [&env](const MdpState& s) {
    std::vector<double> p(static_cast<std::size_t>(s.node_count()), 0.0);
    p[static_cast<std::size_t>(weak_expert_action(env, s))] = 1.0;
    return p;
  };
}

}  // namespace gnarl
