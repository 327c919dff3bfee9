#include "gnarl/environments.hpp"
#include "gnarl/oracles.hpp"
#include "gnarl/rng.hpp"

namespace gnarl {

std::vector<FeatureSpec> MvcEnvironment::input_schema() const {
  return {{"adj", Location::edge, FeatureKind::mask, Stage::input, 0},
          {"w", Location::node, FeatureKind::scalar, Stage::input, 0}};
}

std::vector<FeatureSpec> MvcEnvironment::state_schema() const {
  std::vector<FeatureSpec> s{{"in_cover", Location::node, FeatureKind::mask, Stage::state, 0}};
  auto ph = phase_specs();
  s.insert(s.end(), ph.begin(), ph.end());
  return s;
}

Instance MvcEnvironment::make_instance(const Graph& g, std::uint64_t seed, std::string id) const {
  if (g.directed()) throw std::invalid_argument("mvc: graphs must be undirected");
  Graph wg = g.node_weighted() ? g : with_uniform_node_weights(g, derive_seed(seed, 2));
  auto graph = std::make_shared<const Graph>(std::move(wg));
  auto inputs = std::make_shared<FeatureStore>();
  const auto schema = input_schema();
  inputs->add(schema[0], *graph, 1.0);
  inputs->add(schema[1], *graph, 0.0);
  inputs->values("w") = *graph->node_weights();
  return {graph, inputs, seed, std::move(id)};
}

void MvcEnvironment::init_state(MdpState& s) const { add_state_features(s); }

std::vector<char> MvcEnvironment::cover(const MdpState& s) {
  const auto& c = s.state.values("in_cover");
  std::vector<char> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] == 1.0;
  return out;
}

std::vector<char> MvcEnvironment::mask(const MdpState& s) const {
  auto c = cover(s);
  for (auto& x : c) x = !x;
  return c;
}

bool MvcEnvironment::terminal(const MdpState& s) const { return is_vertex_cover(s.g(), cover(s)); }

double MvcEnvironment::objective(const MdpState& s) const {
  const auto& c = s.state.values("in_cover");
  const auto& w = s.inputs->values("w");
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] == 1.0) total += w[i];
  return -total;
}

void MvcEnvironment::transition(MdpState& s, int v) const {
  s.state.set_node("in_cover", v, 1.0);
  advance_phase(s, v);
}

bool MvcEnvironment::solved(const MdpState& s) const { return terminal(s); }

std::string MvcEnvironment::canonical_solution(const MdpState& s) const {
  std::vector<int> nodes;
  const auto c = cover(s);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i]) nodes.push_back(static_cast<int>(i));
  return join_ints(nodes);
}

std::optional<std::string> MvcEnvironment::reference_solution(const Instance& inst) const {
  if (inst.graph->node_count() > kMvcExactMaxNodes) return std::nullopt;
  return join_ints(mvc_exact_cover(*inst.graph));
}

}  // namespace gnarl
