#include <functional>
#include <numeric>
#include <queue>

#include "gnarl/environments.hpp"
#include "gnarl/rng.hpp"

namespace gnarl {

std::vector<FeatureSpec> SearchEnvironment::input_schema() const {
  std::vector<FeatureSpec> s;
  if (bfs_) s.push_back({"v_s", Location::node, FeatureKind::mask_one, Stage::input, 0});
  s.push_back({"adj", Location::edge, FeatureKind::scalar, Stage::input, 0});
  return s;
}

std::vector<FeatureSpec> SearchEnvironment::state_schema() const {
  auto s = phase_specs();
  s.push_back({"pred", Location::node, FeatureKind::pointer, Stage::state, 0});
  s.push_back({"reach", Location::node, FeatureKind::mask, Stage::state, 0});
  return s;
}

Instance SearchEnvironment::make_instance(const Graph& g, std::uint64_t seed, std::string id) const {
  if (bfs_ && g.directed()) throw std::invalid_argument("bfs: graphs must be undirected");
  auto graph = std::make_shared<const Graph>(g);
  auto inputs = std::make_shared<FeatureStore>();
  for (const auto& spec : input_schema()) inputs->add(spec, g, spec.name == "adj" ? 1.0 : 0.0);
  if (bfs_) {
    Rng rng(seed);
    inputs->set_node("v_s", static_cast<int>(rng.below(static_cast<std::uint64_t>(g.node_count()))), 1.0);
  }
  return {graph, inputs, seed, std::move(id)};
}

void SearchEnvironment::init_state(MdpState& s) const {
  add_state_features(s);
  auto& pred = s.state.values("pred");
  std::iota(pred.begin(), pred.end(), 0.0);
}

namespace {

bool reached(const MdpState& s, int v) { return s.state.node("reach", v) == 1.0; }

bool has_unreached_neighbor(const MdpState& s, int v) {
  for (int u : s.g().neighbors(v))
    if (!reached(s, u)) return true;
  return false;
}

}  // namespace

std::vector<char> SearchEnvironment::mask(const MdpState& s) const {
  const int n = s.node_count();
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  if (s.phase() == 1) {
    if (!bfs_) {
      std::fill(m.begin(), m.end(), 1);
      return m;
    }
    bool any_reached = false;
    for (int v = 0; v < n; ++v) {
      if (reached(s, v)) {
        any_reached = true;
        m[static_cast<std::size_t>(v)] = has_unreached_neighbor(s, v);
      }
    }
    const int start = s.context->start;
    if (!any_reached && s.g().degree(start) > 0) m[static_cast<std::size_t>(start)] = 1;
    return m;
  }
  const int u = selected_node(s, 1);
  for (int v : s.g().neighbors(u))
    if (!bfs_ || !reached(s, v)) m[static_cast<std::size_t>(v)] = 1;
  if (!bfs_) m[static_cast<std::size_t>(u)] = 1;
  return m;
}

bool SearchEnvironment::terminal(const MdpState& s) const {
  if (bfs_) {
    if (s.phase() != 1) return false;
    const auto m = mask(s);
    return std::find(m.begin(), m.end(), 1) == m.end();
  }
  for (int v = 0; v < s.node_count(); ++v)
    if (!reached(s, v)) return false;
  return true;
}

void SearchEnvironment::transition(MdpState& s, int v) const {
  if (s.phase() == 2) {
    const int u = selected_node(s, 1);
    s.state.set_node("reach", u, 1.0);
    s.state.set_node("reach", v, 1.0);
    s.state.set_node("pred", v, u);
  }
  advance_phase(s, v);
}

bool SearchEnvironment::solved(const MdpState& s) const {
  const auto pred = pointer_values(s);
  return bfs_ ? check_bfs(s.g(), s.context->start, pred) : check_dfs(s.g(), pred);
}

std::string SearchEnvironment::canonical_solution(const MdpState& s) const { return join_ints(pointer_values(s)); }

std::optional<std::string> SearchEnvironment::reference_solution(const Instance& inst) const {
  const Graph& g = *inst.graph;
  const int n = g.node_count();
  std::vector<int> pred(static_cast<std::size_t>(n));
  std::iota(pred.begin(), pred.end(), 0);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  if (bfs_) {
    const int start = start_node(*inst.inputs);
    std::queue<int> q;
    q.push(start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : g.neighbors(u)) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          pred[static_cast<std::size_t>(v)] = u;
          q.push(v);
        }
      }
    }
  } else {
    std::function<void(int)> visit = [&](int u) {
      seen[static_cast<std::size_t>(u)] = 1;
      for (int v : g.neighbors(u)) {
        if (!seen[static_cast<std::size_t>(v)]) {
          pred[static_cast<std::size_t>(v)] = u;
          visit(v);
        }
      }
    };
    for (int v = 0; v < n; ++v)
      if (!seen[static_cast<std::size_t>(v)]) visit(v);
  }
  return join_ints(pred);
}

}  // namespace gnarl
