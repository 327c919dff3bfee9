#include <cmath>
#include <numeric>

#include "common.hpp"

namespace gnarl {

std::vector<FeatureSpec> BellmanFordEnvironment::input_schema() const {
  return {{"A", Location::edge, FeatureKind::scalar, Stage::input, 0},
          {"v_s", Location::node, FeatureKind::mask_one, Stage::input, 0}};
}

std::vector<FeatureSpec> BellmanFordEnvironment::state_schema() const {
  auto s = phase_specs();
  s.push_back({"pred", Location::node, FeatureKind::pointer, Stage::state, 0});
  s.push_back({"mask", Location::node, FeatureKind::mask, Stage::state, 0});
  s.push_back({"d", Location::node, FeatureKind::scalar, Stage::state, 0});
  return s;
}

Instance BellmanFordEnvironment::make_instance(const Graph& g, std::uint64_t seed, std::string id) const {
  return detail::weighted_instance(*this, g, seed, std::move(id));
}

std::shared_ptr<const EpisodeContext> BellmanFordEnvironment::make_context(const Instance& inst) const {
  auto ctx = std::make_shared<EpisodeContext>();
  ctx->start = start_node(*inst.inputs);
  ctx->ref_distance = shortest_distances(*inst.graph, ctx->start);
  return ctx;
}

void BellmanFordEnvironment::init_state(MdpState& s) const {
  add_state_features(s);
  auto& pred = s.state.values("pred");
  std::iota(pred.begin(), pred.end(), 0.0);
}

std::vector<char> BellmanFordEnvironment::mask(const MdpState& s) const {
  const int n = s.node_count();
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  if (s.phase() == 1) {
    bool any = false;
    for (int v = 0; v < n; ++v) {
      m[static_cast<std::size_t>(v)] = s.state.node("mask", v) == 1.0;
      any = any || m[static_cast<std::size_t>(v)];
    }
    if (!any) m[static_cast<std::size_t>(s.context->start)] = 1;
    return m;
  }
  for (int v : s.g().neighbors(selected_node(s, 1))) m[static_cast<std::size_t>(v)] = 1;
  return m;
}

bool BellmanFordEnvironment::terminal(const MdpState& s) const {
  const auto& ref = s.context->ref_distance;
  const auto& d = s.state.values("d");
  const auto& visited = s.state.values("mask");
  for (int v = 0; v < s.node_count(); ++v) {
    const double r = ref[static_cast<std::size_t>(v)];
    if (std::isinf(r)) continue;
    if (v != s.context->start && visited[static_cast<std::size_t>(v)] != 1.0) return false;
    if (std::abs(d[static_cast<std::size_t>(v)] - r) > 1e-9 * std::max(1.0, r)) return false;
  }
  return true;
}

void BellmanFordEnvironment::transition(MdpState& s, int v) const {
  if (s.phase() == 1) {
    // v_s is visited by being selected; otherwise it could never be expanded.
    if (v == s.context->start) s.state.set_node("mask", v, 1.0);
  } else {
    const int u = selected_node(s, 1);
    const double a = s.g().weight(u, v);
    s.state.set_node("d", v, s.state.node("d", u) + a);
    s.state.set_node("mask", v, 1.0);
    s.state.set_node("pred", v, u);
  }
  advance_phase(s, v);
}

bool BellmanFordEnvironment::solved(const MdpState& s) const {
  return check_bellman_ford(s.g(), s.context->start, pointer_values(s));
}

std::string BellmanFordEnvironment::canonical_solution(const MdpState& s) const { return join_ints(pointer_values(s)); }

std::optional<std::string> BellmanFordEnvironment::reference_solution(const Instance& inst) const {
  const Graph& g = *inst.graph;
  const int start = start_node(*inst.inputs);
  const auto dist = shortest_distances(g, start);
  std::vector<int> pred(static_cast<std::size_t>(g.node_count()));
  std::iota(pred.begin(), pred.end(), 0);
  for (int v = 0; v < g.node_count(); ++v) {
    if (v == start || std::isinf(dist[static_cast<std::size_t>(v)])) continue;
    for (int u = 0; u < g.node_count(); ++u) {
      if (u == v || !g.has_edge(u, v)) continue;
      if (std::abs(dist[static_cast<std::size_t>(u)] + g.weight(u, v) - dist[static_cast<std::size_t>(v)]) <= 1e-12) {
        pred[static_cast<std::size_t>(v)] = u;
        break;
      }
    }
  }
  return join_ints(pred);
}

}  // namespace gnarl
