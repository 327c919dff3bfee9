#include <cmath>
#include <limits>

#include "gnarl/mdp.hpp"
#include "gnarl/rng.hpp"

namespace gnarl {

int choose_action(const std::vector<double>& probs, const std::vector<char>& mask, const ActionMode& mode, Rng& rng) {
  const std::size_t n = mask.size();
  if (probs.size() != n) throw std::invalid_argument("choose_action: distribution size does not match node count");
  double allowed_mass = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (mask[i] && probs[i] > 0.0) allowed_mass += probs[i];
  if (!(allowed_mass > 0.0)) throw InvalidAction("policy places no mass on any allowed action");

  if (mode.greedy || mode.temperature <= 0.0) {
    int best = -1;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i] && probs[i] > 0.0 && (best < 0 || probs[i] > probs[static_cast<std::size_t>(best)]))
        best = static_cast<int>(i);
    return best;
  }
  // pi^(1/lambda), normalised in log space so tiny temperatures stay finite.
  double max_logit = -std::numeric_limits<double>::infinity();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i] && probs[i] > 0.0) {
      w[i] = std::log(probs[i]) / mode.temperature;
      max_logit = std::max(max_logit, w[i]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) w[i] = (mask[i] && probs[i] > 0.0) ? std::exp(w[i] - max_logit) : 0.0;
  return static_cast<int>(rng.categorical(w));
}

double Episode::total_reward() const {
  double s = 0.0;
  for (double r : trajectory.rewards) s += r;
  return s;
}

namespace {

struct Live {
  Episode ep;
  MdpState state;
  Rng rng;
  bool done = false;
};

Live start(const Environment& env, const Instance& inst, std::uint64_t seed) {
  Live l{{}, env.reset(inst), Rng(seed), false};
  l.ep.trajectory.env = env.name();
  l.ep.trajectory.graph_id = inst.id;
  l.ep.trajectory.seed = seed;
  l.ep.initial_objective = l.state.objective;
  l.ep.terminal = env.terminal(l.state);
  l.done = l.ep.terminal || l.state.t >= l.state.horizon;
  return l;
}

void advance(const Environment& env, Live& l, const std::vector<double>& probs, const RolloutOptions& opts) {
  const auto m = env.mask(l.state);
  const int a = choose_action(probs, m, opts.mode, l.rng);
  auto r = step(env, l.state, a);
  l.ep.trajectory.actions.push_back(a);
  l.ep.trajectory.rewards.push_back(r.reward);
  if (opts.record_probs) l.ep.trajectory.probs.push_back(probs);
  l.state = std::move(r.next);
  l.ep.terminal = r.terminal;
  l.ep.truncated = r.truncated && !r.terminal;
  l.done = r.terminal || r.truncated;
}

Episode finish(Live& l) {
  l.ep.final_state = std::move(l.state);
  return std::move(l.ep);
}

}  // namespace

Episode rollout(const Environment& env, const Instance& inst, const Policy& policy, const RolloutOptions& opts) {
  Live l = start(env, inst, opts.seed);
  while (!l.done) advance(env, l, policy(l.state), opts);
  return finish(l);
}

std::vector<Episode> rollout_batch(const Environment& env, const std::vector<Instance>& instances,
                                   const BatchPolicy& policy, const RolloutOptions& opts, int max_batch) {
  std::vector<Episode> out;
  out.reserve(instances.size());
  const std::size_t chunk = static_cast<std::size_t>(std::max(1, max_batch));
  for (std::size_t lo = 0; lo < instances.size(); lo += chunk) {
    const std::size_t hi = std::min(instances.size(), lo + chunk);
    std::vector<Live> live;
    live.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) live.push_back(start(env, instances[i], derive_seed(opts.seed, opts.first_index + i)));
    while (true) {
      std::vector<const MdpState*> states;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < live.size(); ++i) {
        if (!live[i].done) {
          states.push_back(&live[i].state);
          idx.push_back(i);
        }
      }
      if (states.empty()) break;
      const auto probs = policy(states);
      for (std::size_t k = 0; k < idx.size(); ++k) advance(env, live[idx[k]], probs[k], opts);
    }
    for (auto& l : live) out.push_back(finish(l));
  }
  return out;
}

MdpState replay(const Environment& env, const Instance& inst, const std::vector<int>& actions) {
  MdpState s = env.reset(inst);
  for (int a : actions) s = step(env, s, a).next;
  return s;
}

}  // namespace gnarl
