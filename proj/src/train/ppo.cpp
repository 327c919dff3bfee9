#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gnarl/rng.hpp"
#include "gnarl/train.hpp"

namespace gnarl::train {

void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                 const std::vector<char>& dones, double last_value, bool last_done, double gamma, double lambda,
                 std::vector<double>& advantages, std::vector<double>& returns) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) throw std::invalid_argument("compute_gae: size mismatch");
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double last_gae = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const bool end = dones[k] != 0 || (k + 1 == n && last_done);
    const double next_value = k + 1 == n ? last_value : values[k + 1];
    const double non_terminal = end ? 0.0 : 1.0;
    const double delta = rewards[k] + gamma * next_value * non_terminal - values[k];
    last_gae = delta + gamma * lambda * non_terminal * last_gae;
    advantages[k] = last_gae;
    returns[k] = advantages[k] + values[k];
  }
}

namespace {

struct Lane {
  MdpState state;
  double episode_reward = 0.0;
  int episode_length = 0;
  std::vector<MdpState> states;
  std::vector<int> actions;
  std::vector<double> logp, values, rewards;
  std::vector<char> dones;
};

MdpState fresh_state(const Environment& env, const std::vector<Instance>& train, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    MdpState s = env.reset(train[static_cast<std::size_t>(rng.below(train.size()))]);
    if (!env.terminal(s)) return s;
  }
  throw std::runtime_error("train_ppo: training instances start in terminal states");
}

}  // namespace

TrainResult train_ppo(const Environment& env, nn::Model& model, const std::vector<Instance>& train,
                      const std::vector<Instance>& val, const PpoConfig& cfg, std::uint64_t seed,
                      const LogSink& sink, int workers) {
  if (!env.has_objective()) throw std::invalid_argument("train_ppo: " + env.name() + " has no reward");
  if (train.empty()) throw std::invalid_argument("train_ppo: empty training set");
  if (cfg.ent_coef != 0.0) throw std::invalid_argument("train_ppo: entropy bonus is not supported");
  const bool triplets = model.config().processor == "triplet";
  Adam opt(model.parameters(), {cfg.lr, 0.9, 0.999, cfg.adam_eps});
  Rng rng(seed);
  const int lanes_n = std::max(1, std::min(cfg.n_envs, cfg.n_steps));
  const int per_lane = (cfg.n_steps + lanes_n - 1) / lanes_n;

  std::vector<Lane> lanes(static_cast<std::size_t>(lanes_n));
  for (auto& l : lanes) l.state = fresh_state(env, train, rng);

  TrainResult result;
  nn::Model best = model;
  bool have_best = false;
  long windows = 0;

  while (result.env_steps < cfg.total_steps) {
    // Collection with a frozen snapshot of the current parameters.
    double ep_reward_sum = 0.0;
    int ep_count = 0;
    for (auto& l : lanes) {
      l.states.clear();
      l.actions.clear();
      l.logp.clear();
      l.values.clear();
      l.rewards.clear();
      l.dones.clear();
    }
    for (int k = 0; k < per_lane; ++k) {
      std::vector<const MdpState*> ptrs;
      for (auto& l : lanes) ptrs.push_back(&l.state);
      const auto ev = model.evaluate(env, ptrs);
      std::vector<int> truncated_lanes;
      std::vector<MdpState> truncated_states;
      for (std::size_t e = 0; e < lanes.size(); ++e) {
        Lane& l = lanes[e];
        const auto mask = env.mask(l.state);
        const int a = choose_action(ev.probs[e], mask, ActionMode::sample(1.0), rng);
        StepResult res = step(env, l.state, a);
        l.states.push_back(l.state);
        l.actions.push_back(a);
        l.logp.push_back(std::log(ev.probs[e][static_cast<std::size_t>(a)]));
        l.values.push_back(ev.values[e]);
        l.rewards.push_back(res.reward);
        l.episode_reward += res.reward;
        ++l.episode_length;
        const bool done = res.terminal || res.truncated;
        l.dones.push_back(done ? 1 : 0);
        if (res.truncated && !res.terminal) {
          truncated_lanes.push_back(static_cast<int>(e));
          truncated_states.push_back(res.next);
        }
        if (done) {
          ep_reward_sum += l.episode_reward;
          ++ep_count;
          l.episode_reward = 0.0;
          l.episode_length = 0;
          l.state = fresh_state(env, train, rng);
        } else {
          l.state = std::move(res.next);
        }
      }
      if (!truncated_lanes.empty()) {
        std::vector<const MdpState*> tp;
        for (const auto& s : truncated_states) tp.push_back(&s);
        const auto tv = model.evaluate(env, tp);
        for (std::size_t i = 0; i < truncated_lanes.size(); ++i)
          lanes[static_cast<std::size_t>(truncated_lanes[i])].rewards.back() += cfg.gamma * tv.values[i];
      }
    }
    result.env_steps += static_cast<long>(per_lane) * lanes_n;
    if (ep_count > 0 && std::isnan(ep_reward_sum / ep_count))
      throw NumericalError("train_ppo: mean episode reward is NaN");

    // Advantages per lane, then one flat buffer.
    std::vector<const MdpState*> states;
    std::vector<int> actions;
    std::vector<double> old_logp, advantages, returns;
    {
      std::vector<const MdpState*> ptrs;
      for (auto& l : lanes) ptrs.push_back(&l.state);
      const auto last = model.evaluate(env, ptrs);
      for (std::size_t e = 0; e < lanes.size(); ++e) {
        Lane& l = lanes[e];
        std::vector<double> adv, ret;
        compute_gae(l.rewards, l.values, l.dones, last.values[e], l.dones.back() != 0, cfg.gamma, cfg.gae_lambda,
                    adv, ret);
        for (std::size_t k = 0; k < l.states.size(); ++k) {
          states.push_back(&l.states[k]);
          actions.push_back(l.actions[k]);
          old_logp.push_back(l.logp[k]);
          advantages.push_back(adv[k]);
          returns.push_back(ret[k]);
        }
      }
    }

    // Updates.
    std::vector<std::size_t> order(states.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double loss_sum = 0.0;
    long loss_count = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      rng.shuffle(order);
      for (std::size_t lo = 0; lo < order.size(); lo += static_cast<std::size_t>(cfg.batch)) {
        const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(cfg.batch));
        std::vector<const MdpState*> mb;
        std::vector<double> mb_old, mb_adv, mb_ret;
        for (std::size_t k = lo; k < hi; ++k) {
          mb.push_back(states[order[k]]);
          mb_old.push_back(old_logp[order[k]]);
          mb_adv.push_back(advantages[order[k]]);
          mb_ret.push_back(returns[order[k]]);
        }
        if (cfg.normalize_advantage && mb_adv.size() > 1) {
          const double mean = std::accumulate(mb_adv.begin(), mb_adv.end(), 0.0) / static_cast<double>(mb_adv.size());
          double var = 0.0;
          for (double a : mb_adv) var += (a - mean) * (a - mean);
          const double sd = std::sqrt(var / static_cast<double>(mb_adv.size() - 1));
          for (double& a : mb_adv) a = (a - mean) / (sd + 1e-8);
        }
        const nn::GraphBatch gb = nn::build_batch(env, mb, triplets);
        std::vector<int> rows;
        for (std::size_t k = lo; k < hi; ++k) rows.push_back(gb.node_offsets[k - lo] + actions[order[k]]);
        nn::Tape tape;
        const auto out = model.forward(tape, gb);
        nn::Var pg = tape.ppo_clip(out.logp, rows, mb_old, mb_adv, cfg.clip);
        nn::Var vl = tape.mse(out.value, mb_ret);
        nn::Var loss = tape.combine({pg, vl}, {1.0, cfg.vf_coef});
        const double lv = tape.value(loss).data[0];
        if (!std::isfinite(lv)) throw NumericalError("train_ppo: non-finite loss");
        model.zero_grad();
        tape.backward(loss);
        clip_grad_norm(model.parameters(), cfg.max_grad_norm);
        opt.step();
        ++result.updates;
        loss_sum += lv;
        ++loss_count;
      }
    }
    ++windows;

    const bool last_window = result.env_steps >= cfg.total_steps;
    if (windows % cfg.eval_every == 0 || last_window) {
      LogRecord rec;
      rec.phase = "ppo";
      rec.step = result.env_steps;
      rec.loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
      rec.score = validate_policy(env, model, val, workers);
      if (std::isnan(rec.score.reward)) throw NumericalError("train_ppo: validation reward is NaN");
      if (!have_best || rec.score.better_than(result.best)) {
        result.best = rec.score;
        best = model;
        have_best = true;
      }
      result.log.push_back(rec);
      if (sink) sink(rec);
    }
  }
  if (have_best) model = best;
  return result;
}

}  // namespace gnarl::train
