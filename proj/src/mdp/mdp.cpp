#include "gnarl/mdp.hpp"

namespace gnarl {

std::vector<FeatureSpec> Environment::schema() const {
  auto s = input_schema();
  auto st = state_schema();
  s.insert(s.end(), st.begin(), st.end());
  return s;
}

std::shared_ptr<const EpisodeContext> Environment::make_context(const Instance& inst) const {
  auto ctx = std::make_shared<EpisodeContext>();
  if (inst.inputs->contains("v_s")) ctx->start = start_node(*inst.inputs);
  return ctx;
}

MdpState Environment::reset(const Instance& inst) const {
  if (!inst.graph || !inst.inputs) throw FeatureError(name() + ": instance is missing its graph or inputs");
  const auto& inputs = *inst.inputs;
  for (const auto& spec : input_schema()) {
    const int i = inputs.find(spec.name);
    if (i < 0) throw FeatureError(name() + ": missing input feature '" + spec.name + "'");
    if (!(inputs.features()[static_cast<std::size_t>(i)].spec == spec))
      throw FeatureError(name() + ": input feature '" + spec.name + "' does not match the schema");
  }
  if (inputs.features().size() != input_schema().size())
    throw FeatureError(name() + ": instance has unexpected extra input features");
  inputs.validate(*inst.graph);

  MdpState s;
  s.graph = inst.graph;
  s.inputs = inst.inputs;
  s.context = make_context(inst);
  init_state(s);
  s.state.validate(*s.graph);
  s.t = 0;
  s.horizon = horizon(*s.graph, *s.context);
  s.objective = has_objective() ? objective(s) : 0.0;
  return s;
}

std::vector<FeatureSpec> Environment::phase_specs(bool all_psi) const {
  const int P = phase_count();
  std::vector<FeatureSpec> out{{"p", Location::graph, FeatureKind::categorical, Stage::state, P}};
  for (int m = 1; m <= (all_psi ? P : 1); ++m)
    out.push_back({"psi_" + std::to_string(m), Location::node, FeatureKind::categorical, Stage::state, 2});
  return out;
}

void Environment::add_state_features(MdpState& s) const {
  for (const auto& spec : state_schema()) s.state.add(spec, s.g(), 0.0);
}

void Environment::advance_phase(MdpState& s, int action) const {
  const int p = s.phase();
  const std::string psi = "psi_" + std::to_string(p);
  if (s.state.contains(psi)) {
    auto& vals = s.state.values(psi);
    std::fill(vals.begin(), vals.end(), 0.0);
    vals[static_cast<std::size_t>(action)] = 1.0;
  }
  s.state.set_graph_value("p", static_cast<double>(p % phase_count()));
}

int Environment::start_node(const FeatureStore& inputs) {
  const auto& v = inputs.values("v_s");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == 1.0) return static_cast<int>(i);
  throw FeatureError("v_s has no selected node");
}

int selected_node(const MdpState& s, int phase) {
  const std::string psi = "psi_" + std::to_string(phase);
  const auto& vals = s.state.values(psi);
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] == 1.0) return static_cast<int>(i);
  return -1;
}

StepResult step(const Environment& env, const MdpState& s, int action) {
  if (action < 0 || action >= s.node_count())
    throw InvalidAction("invalid action " + std::to_string(action) + ": not a node");
  if (s.t >= s.horizon) throw InvalidAction("invalid action: episode already reached its horizon");
  if (env.terminal(s)) throw InvalidAction("invalid action: state is terminal");
  const auto m = env.mask(s);
  if (!m[static_cast<std::size_t>(action)])
    throw InvalidAction("invalid action " + std::to_string(action) + ": masked in the current state");

  StepResult r{s, 0.0, false, false};
  env.transition(r.next, action);
  r.next.t = s.t + 1;
  r.next.state.validate(r.next.g());
  if (env.has_objective()) {
    r.next.objective = env.objective(r.next);
    r.reward = r.next.objective - s.objective;
  }
  r.terminal = env.terminal(r.next);
  r.truncated = r.next.t >= r.next.horizon;
  return r;
}

}  // namespace gnarl
