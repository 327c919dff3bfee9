#include <cmath>
#include <numeric>

#include "common.hpp"

namespace gnarl {

std::vector<FeatureSpec> MstPrimEnvironment::input_schema() const {
  return {{"A", Location::edge, FeatureKind::scalar, Stage::input, 0},
          {"v_s", Location::node, FeatureKind::mask_one, Stage::input, 0}};
}

std::vector<FeatureSpec> MstPrimEnvironment::state_schema() const {
  auto s = phase_specs();
  s.push_back({"pred", Location::node, FeatureKind::pointer, Stage::state, 0});
  s.push_back({"key", Location::node, FeatureKind::scalar, Stage::state, 0});
  s.push_back({"mark", Location::node, FeatureKind::mask, Stage::state, 0});
  s.push_back({"in_queue", Location::node, FeatureKind::mask, Stage::state, 0});
  return s;
}

Instance MstPrimEnvironment::make_instance(const Graph& g, std::uint64_t seed, std::string id) const {
  if (g.directed()) throw std::invalid_argument("mst_prim: graphs must be undirected");
  return detail::weighted_instance(*this, g, seed, std::move(id));
}

std::shared_ptr<const EpisodeContext> MstPrimEnvironment::make_context(const Instance& inst) const {
  auto ctx = std::make_shared<EpisodeContext>();
  ctx->start = start_node(*inst.inputs);
  ctx->ref_mst_weight = msf_weight(*inst.graph);
  return ctx;
}

void MstPrimEnvironment::init_state(MdpState& s) const {
  add_state_features(s);
  auto& pred = s.state.values("pred");
  std::iota(pred.begin(), pred.end(), 0.0);
}

std::vector<char> MstPrimEnvironment::mask(const MdpState& s) const {
  const int n = s.node_count();
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  if (s.phase() == 1) {
    bool any_marked = false;
    for (int v = 0; v < n; ++v) {
      m[static_cast<std::size_t>(v)] = s.state.node("in_queue", v) == 1.0;
      any_marked = any_marked || s.state.node("mark", v) == 1.0;
    }
    const int psi = selected_node(s, 1);
    if (psi >= 0) m[static_cast<std::size_t>(psi)] = 1;
    if (!any_marked) m[static_cast<std::size_t>(s.context->start)] = 1;
    return m;
  }
  const int u = selected_node(s, 1);
  for (int v : s.g().neighbors(u)) m[static_cast<std::size_t>(v)] = 1;
  // An isolated psi_1 may only reselect itself, which changes nothing.
  if (s.g().degree(u) == 0) m[static_cast<std::size_t>(u)] = 1;
  return m;
}

bool MstPrimEnvironment::terminal(const MdpState& s) const {
  return check_mst(s.g(), pointer_values(s));
}

void MstPrimEnvironment::transition(MdpState& s, int v) const {
  if (s.phase() == 1) {
    s.state.set_node("mark", v, 1.0);
    s.state.set_node("in_queue", v, 0.0);
  } else if (const int u = selected_node(s, 1); u != v) {
    const double a = s.g().weight(u, v);
    if (s.state.node("mark", v) == 0.0 && (s.state.node("in_queue", v) == 0.0 || a < s.state.node("key", v))) {
      s.state.set_node("pred", v, u);
      s.state.set_node("key", v, a);
      s.state.set_node("in_queue", v, 1.0);
    }
  }
  advance_phase(s, v);
}

bool MstPrimEnvironment::solved(const MdpState& s) const { return check_mst(s.g(), pointer_values(s)); }

std::string MstPrimEnvironment::canonical_solution(const MdpState& s) const { return join_ints(pointer_values(s)); }

std::optional<std::string> MstPrimEnvironment::reference_solution(const Instance& inst) const {
  const Graph& g = *inst.graph;
  const int n = g.node_count();
  const int start = start_node(*inst.inputs);
  std::vector<int> pred(static_cast<std::size_t>(n));
  std::iota(pred.begin(), pred.end(), 0);
  std::vector<double> key(static_cast<std::size_t>(n), kInf);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  key[static_cast<std::size_t>(start)] = 0.0;
  for (int it = 0; it < n; ++it) {
    int u = -1;
    for (int v = 0; v < n; ++v)
      if (!done[static_cast<std::size_t>(v)] && !std::isinf(key[static_cast<std::size_t>(v)]) &&
          (u < 0 || key[static_cast<std::size_t>(v)] < key[static_cast<std::size_t>(u)]))
        u = v;
    if (u < 0) break;
    done[static_cast<std::size_t>(u)] = 1;
    for (int v : g.neighbors(u)) {
      if (!done[static_cast<std::size_t>(v)] && g.weight(u, v) < key[static_cast<std::size_t>(v)]) {
        key[static_cast<std::size_t>(v)] = g.weight(u, v);
        pred[static_cast<std::size_t>(v)] = u;
      }
    }
  }
  return join_ints(pred);
}

}  // namespace gnarl
