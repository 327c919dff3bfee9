#include <cmath>
#include <map>
#include <stdexcept>

#include "gnarl/oracles.hpp"
#include "gnarl/parallel.hpp"
#include "gnarl/rng.hpp"
#include "gnarl/train.hpp"

namespace gnarl::train {

bool ValidationScore::better_than(const ValidationScore& o) const {
  if (success != o.success) return success > o.success;
  if (reward != o.reward) return reward > o.reward;
  return length < o.length;
}

std::vector<Instance> make_instances(const Environment& env, const std::vector<Graph>& graphs, std::uint64_t seed,
                                     const std::string& prefix) {
  std::vector<Instance> out;
  out.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i)
    out.push_back(env.make_instance(graphs[i], derive_seed(seed, i), prefix + std::to_string(i)));
  return out;
}

std::vector<Trajectory> collect_demos(const Environment& env, const std::vector<Instance>& instances, bool weak,
                                      std::uint64_t seed, int workers) {
  std::vector<Trajectory> out(instances.size());
  parallel_for(static_cast<int>(instances.size()), workers, [&](int i) {
    const Instance& inst = instances[static_cast<std::size_t>(i)];
    RolloutOptions ro;
    ro.mode = weak ? ActionMode::greedy_mode() : ActionMode::sample(1.0);
    ro.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    ro.record_probs = true;
    const Policy policy = weak ? make_weak_expert_policy(env) : make_expert_policy(env, inst);
    out[static_cast<std::size_t>(i)] = rollout(env, inst, policy, ro).trajectory;
  });
  return out;
}

std::vector<DemoSample> expand_demos(const Environment& env, const std::vector<Instance>& instances,
                                     const std::vector<Trajectory>& demos) {
  std::map<std::string, const Instance*> by_id;
  for (const auto& inst : instances) by_id[inst.id] = &inst;
  std::vector<DemoSample> out;
  for (std::size_t i = 0; i < demos.size(); ++i) {
    const Trajectory& tr = demos[i];
    const auto it = by_id.find(tr.graph_id);
    if (it == by_id.end()) throw std::invalid_argument("expand_demos: no instance with id '" + tr.graph_id + "'");
    if (!tr.probs.empty() && tr.probs.size() != tr.actions.size())
      throw std::invalid_argument("expand_demos: probs and actions differ in length");
    MdpState s = env.reset(*it->second);
    for (std::size_t t = 0; t < tr.actions.size(); ++t) {
      DemoSample d;
      d.state = s;
      d.action = tr.actions[t];
      if (!tr.probs.empty()) d.target = tr.probs[t];
      s = step(env, s, tr.actions[t]).next;
      out.push_back(std::move(d));
    }
  }
  return out;
}

ValidationScore validate_policy(const Environment& env, nn::Model& model, const std::vector<Instance>& val,
                                int workers) {
  if (val.empty()) throw std::invalid_argument("validate_policy: empty validation set");
  const int n = static_cast<int>(val.size());
  workers = std::max(1, std::min(workers, n));
  std::vector<double> success(val.size()), reward(val.size()), length(val.size());
  const BatchPolicy policy = model.batch_policy(env);
  parallel_for(workers, workers, [&](int w) {
    const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    std::vector<Instance> chunk(val.begin() + lo, val.begin() + hi);
    RolloutOptions ro;
    ro.first_index = static_cast<std::uint64_t>(lo);
    const auto eps = rollout_batch(env, chunk, policy, ro);
    for (int i = lo; i < hi; ++i) {
      const Episode& ep = eps[static_cast<std::size_t>(i - lo)];
      success[static_cast<std::size_t>(i)] = ep.terminal && env.solved(ep.final_state) ? 1.0 : 0.0;
      reward[static_cast<std::size_t>(i)] = ep.total_reward();
      length[static_cast<std::size_t>(i)] = ep.length();
    }
  });
  ValidationScore s;
  for (std::size_t i = 0; i < val.size(); ++i) {
    s.success += success[i];
    s.reward += reward[i];
    s.length += length[i];
  }
  s.success /= n;
  s.reward /= n;
  s.length /= n;
  return s;
}

TrainResult train_bc(const Environment& env, nn::Model& model, const std::vector<DemoSample>& demos,
                     const std::vector<Instance>& val, const BcConfig& cfg, std::uint64_t seed, const LogSink& sink,
                     int workers) {
  if (demos.empty()) throw std::invalid_argument("train_bc: empty demonstration set");
  if (cfg.batch < 1) throw std::invalid_argument("train_bc: batch must be >= 1");
  const bool triplets = model.config().processor == "triplet";
  Adam opt(model.parameters(), {cfg.lr, 0.9, 0.999, cfg.adam_eps});
  Rng rng(seed);
  std::vector<std::size_t> order(demos.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  nn::Model best = model;
  bool have_best = false;
  double loss_sum = 0.0;
  long loss_count = 0;
  long last_eval = -1;

  auto evaluate_now = [&] {
    LogRecord rec;
    rec.phase = "bc";
    rec.step = result.updates;
    rec.loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
    rec.score = validate_policy(env, model, val, workers);
    loss_sum = 0.0;
    loss_count = 0;
    last_eval = result.updates;
    if (!have_best || rec.score.better_than(result.best)) {
      result.best = rec.score;
      best = model;
      have_best = true;
    }
    result.log.push_back(rec);
    if (sink) sink(rec);
  };

  bool done = cfg.max_updates > 0 && result.updates >= cfg.max_updates;
  for (int epoch = 0; epoch < cfg.epochs && !done; ++epoch) {
    rng.shuffle(order);
    for (std::size_t lo = 0; lo < order.size() && !done; lo += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(cfg.batch));
      std::vector<const MdpState*> states;
      for (std::size_t k = lo; k < hi; ++k) states.push_back(&demos[order[k]].state);
      const nn::GraphBatch gb = nn::build_batch(env, states, triplets);
      std::vector<double> q(static_cast<std::size_t>(gb.nodes), 0.0);
      std::vector<int> picked;
      for (std::size_t k = lo; k < hi; ++k) {
        const DemoSample& d = demos[order[k]];
        const int base = gb.node_offsets[k - lo];
        if (d.target.empty()) {
          picked.push_back(base + d.action);
        } else {
          for (std::size_t v = 0; v < d.target.size(); ++v) q[static_cast<std::size_t>(base) + v] = d.target[v];
        }
      }
      const double scale = 1.0 / static_cast<double>(hi - lo);
      nn::Tape tape;
      const auto out = model.forward(tape, gb);
      nn::Var loss = tape.combine({tape.kl_div(out.logp, q, scale), tape.nll(out.logp, picked, scale)}, {1.0, 1.0});
      const double lv = tape.value(loss).data[0];
      if (!std::isfinite(lv)) throw NumericalError("train_bc: non-finite loss (expert mass on a masked action?)");
      model.zero_grad();
      tape.backward(loss);
      opt.step();
      ++result.updates;
      loss_sum += lv;
      ++loss_count;
      if (result.updates % cfg.eval_every == 0) evaluate_now();
      if (cfg.max_updates > 0 && result.updates >= cfg.max_updates) done = true;
    }
  }
  if (last_eval != result.updates) evaluate_now();
  model = best;
  return result;
}

}  // namespace gnarl::train
