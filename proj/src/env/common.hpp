#pragma once

#include "gnarl/environments.hpp"
#include "gnarl/rng.hpp"

namespace gnarl::detail {

/// Inputs A and v_s; missing weights are sampled uniformly from (0, 1].
inline Instance weighted_instance(const Environment& env, const Graph& g, std::uint64_t seed, std::string id) {
  Graph wg = g.weighted() ? g : with_uniform_weights(g, derive_seed(seed, 1));
  auto graph = std::make_shared<const Graph>(std::move(wg));
  auto inputs = std::make_shared<FeatureStore>();
  for (const auto& spec : env.input_schema()) inputs->add(spec, *graph, 0.0);
  inputs->values("A") = *graph->weights();
  Rng rng(seed);
  inputs->set_node("v_s", static_cast<int>(rng.below(static_cast<std::uint64_t>(graph->node_count()))), 1.0);
  return {graph, inputs, seed, std::move(id)};
}

}  // namespace gnarl::detail
