#include <algorithm>
#include <cmath>

#include "gnarl/environments.hpp"
#include "gnarl/rng.hpp"

namespace gnarl {

std::vector<FeatureSpec> RgcEnvironment::state_schema() const {
  std::vector<FeatureSpec> s{{"adj", Location::edge, FeatureKind::mask, Stage::state, 0}};
  auto ph = phase_specs(false);
  s.insert(s.end(), ph.begin(), ph.end());
  s.push_back({"tau", Location::graph, FeatureKind::scalar, Stage::state, 0});
  return s;
}

int RgcEnvironment::budget(int n) const {
  const double pairs = static_cast<double>(n) * (n - 1);
  return static_cast<int>(std::ceil(opts_.tau * pairs / 2.0 - 1e-9));
}

Instance RgcEnvironment::make_instance(const Graph& g, std::uint64_t seed, std::string id) const {
  if (g.directed()) throw std::invalid_argument("rgc: graphs must be undirected");
  return {std::make_shared<const Graph>(g), std::make_shared<FeatureStore>(), seed, std::move(id)};
}

double RgcEnvironment::robustness_of(const Graph& g, const EpisodeContext& ctx) const {
  return robustness(g, opts_.strategy, opts_.samples, ctx.robustness_seed);
}

std::shared_ptr<const EpisodeContext> RgcEnvironment::make_context(const Instance& inst) const {
  auto ctx = std::make_shared<EpisodeContext>();
  const int n = inst.graph->node_count();
  const int free_pairs = n * (n - 1) / 2 - inst.graph->edge_count();
  ctx->budget = std::min(budget(n), free_pairs);
  ctx->robustness_seed = derive_seed(inst.seed, 3);
  ctx->initial_edges = inst.graph->edge_count();
  ctx->f0 = robustness_of(*inst.graph, *ctx);
  return ctx;
}

void RgcEnvironment::init_state(MdpState& s) const {
  add_state_features(s);
  auto& adj = s.state.values("adj");
  std::fill(adj.begin(), adj.end(), 1.0);
  s.state.set_graph_value("tau", 1.0);
}

std::vector<char> RgcEnvironment::mask(const MdpState& s) const {
  const int n = s.node_count();
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  if (s.phase() == 1) {
    for (int v = 0; v < n; ++v) m[static_cast<std::size_t>(v)] = s.g().degree(v) < n - 1;
    return m;
  }
  const int u = selected_node(s, 1);
  for (int v = 0; v < n; ++v) m[static_cast<std::size_t>(v)] = v != u && !s.g().has_edge(u, v);
  return m;
}

bool RgcEnvironment::terminal(const MdpState& s) const {
  if (s.phase() != 1) return false;
  if (added(s) >= s.context->budget) return true;
  const int n = s.node_count();
  return s.g().edge_count() == n * (n - 1) / 2;
}

double RgcEnvironment::objective(const MdpState& s) const {
  // Phase-1 selections leave the graph unchanged, so J carries over.
  if (s.t == 0) return 0.0;
  if (s.phase() == 2) return s.objective;
  return robustness_of(s.g(), *s.context) - s.context->f0;
}

void RgcEnvironment::transition(MdpState& s, int v) const {
  if (s.phase() == 2) {
    const int u = selected_node(s, 1);
    s.graph = std::make_shared<const Graph>(s.g().with_edge(u, v));
    // Edge indices shift when an edge is inserted; adj is 1 on every current edge.
    s.state.values("adj").assign(static_cast<std::size_t>(s.g().edge_count()), 1.0);
    const double n = s.node_count();
    s.state.set_graph_value("tau", s.state.graph_value("tau") - 1.0 / (n * n - n));
  }
  advance_phase(s, v);
}

std::string RgcEnvironment::canonical_solution(const MdpState& s) const {
  std::string out;
  for (const auto& e : s.g().edges()) out += std::to_string(e.u) + "-" + std::to_string(e.v) + " ";
  return out;
}

}  // namespace gnarl
