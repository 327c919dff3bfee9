#include <algorithm>
#include <numeric>

#include "common.hpp"
#include "gnarl/oracles.hpp"

namespace gnarl {

std::vector<FeatureSpec> TspEnvironment::input_schema() const {
  return {{"A", Location::edge, FeatureKind::scalar, Stage::input, 0},
          {"v_s", Location::node, FeatureKind::mask_one, Stage::input, 0}};
}

std::vector<FeatureSpec> TspEnvironment::state_schema() const {
  std::vector<FeatureSpec> s{{"in_tour", Location::node, FeatureKind::mask, Stage::state, 0}};
  auto ph = phase_specs();
  s.insert(s.end(), ph.begin(), ph.end());
  s.push_back({"pred", Location::node, FeatureKind::pointer, Stage::state, 0});
  return s;
}

Instance TspEnvironment::make_instance(const Graph& g, std::uint64_t seed, std::string id) const {
  const long n = g.node_count();
  if (g.directed() || g.edge_count() != n * (n - 1) / 2) throw std::invalid_argument("tsp: graphs must be complete and undirected");
  return detail::weighted_instance(*this, g, seed, std::move(id));
}

void TspEnvironment::init_state(MdpState& s) const {
  add_state_features(s);
  auto& pred = s.state.values("pred");
  std::iota(pred.begin(), pred.end(), 0.0);
}

std::vector<char> TspEnvironment::mask(const MdpState& s) const {
  const int n = s.node_count();
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  if (s.t == 0) {
    m[static_cast<std::size_t>(s.context->start)] = 1;
    return m;
  }
  for (int v = 0; v < n; ++v) m[static_cast<std::size_t>(v)] = s.state.node("in_tour", v) == 0.0;
  return m;
}

bool TspEnvironment::terminal(const MdpState& s) const {
  for (double x : s.state.values("in_tour"))
    if (x != 1.0) return false;
  return true;
}

std::vector<int> TspEnvironment::tour(const MdpState& s) {
  const int start = s.context->start;
  std::vector<int> out;
  if (s.state.node("in_tour", start) != 1.0) return out;
  int x = start;
  do {
    out.push_back(x);
    x = static_cast<int>(s.state.node("pred", x));
  } while (x != start && static_cast<int>(out.size()) <= s.node_count());
  return out;
}

double TspEnvironment::objective(const MdpState& s) const {
  const auto t = tour(s);
  return t.size() < 2 ? 0.0 : -tour_length(s.g(), t);
}

void TspEnvironment::transition(MdpState& s, int v) const {
  s.state.set_node("in_tour", v, 1.0);
  const int u = selected_node(s, 1);
  if (u >= 0) {
    s.state.set_node("pred", v, s.state.node("pred", u));
    s.state.set_node("pred", u, v);
  }
  advance_phase(s, v);
}

bool TspEnvironment::solved(const MdpState& s) const {
  return terminal(s) && is_hamiltonian_successor(pointer_values(s));
}

std::string TspEnvironment::canonical_cycle(std::vector<int> t) {
  if (t.empty()) return {};
  const auto lo = std::min_element(t.begin(), t.end());
  std::rotate(t.begin(), lo, t.end());
  if (t.size() > 2 && t[1] > t.back()) std::reverse(t.begin() + 1, t.end());
  return join_ints(t);
}

std::string TspEnvironment::canonical_solution(const MdpState& s) const { return canonical_cycle(tour(s)); }

std::optional<std::string> TspEnvironment::reference_solution(const Instance& inst) const {
  if (inst.graph->node_count() > kTspExactMaxNodes) return std::nullopt;
  return canonical_cycle(tsp_exact_tour(*inst.graph));
}

}  // namespace gnarl
