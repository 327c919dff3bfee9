#include "gnarl/rng.hpp"
#include "gnarl/train.hpp"

namespace gnarl::train {

TrainResult train_warmstart(const Environment& env, nn::Model& model, const std::vector<Instance>& train,
                            const std::vector<Instance>& val, const TrainConfig& cfg, const LogSink& sink) {
  const auto demos = collect_demos(env, train, /*weak=*/true, derive_seed(cfg.seed, 21), cfg.workers);
  const auto samples = expand_demos(env, train, demos);
  TrainResult bc = train_bc(env, model, samples, val, cfg.bc, derive_seed(cfg.seed, 22), sink, cfg.workers);
  model.reset_critic(derive_seed(cfg.seed, 23));
  TrainResult ppo = train_ppo(env, model, train, val, cfg.ppo, derive_seed(cfg.seed, 24), sink, cfg.workers);

  TrainResult out;
  out.updates = bc.updates + ppo.updates;
  out.env_steps = ppo.env_steps;
  out.log = bc.log;
  out.log.insert(out.log.end(), ppo.log.begin(), ppo.log.end());
  out.best = ppo.log.empty() ? bc.best : ppo.best;
  return out;
}

nn::Model run_training(const TrainConfig& cfg, TrainResult* result, const LogSink& sink) {
  validate(cfg);
  const auto env = make_environment(cfg.env, cfg.env_options);
  const auto train_graphs = sample_graphs(cfg.data.train, cfg.data.train_graphs, derive_seed(cfg.seed, 1));
  const auto val_graphs = sample_graphs(cfg.data.val, cfg.data.val_graphs, derive_seed(cfg.seed, 2));
  const auto train = make_instances(*env, train_graphs, derive_seed(cfg.seed, 11), "train");
  const auto val = make_instances(*env, val_graphs, derive_seed(cfg.seed, 12), "val");
  nn::Model model(cfg.model, env->schema(), derive_seed(cfg.seed, 3));

  TrainResult r;
  if (cfg.method == "bc") {
    const auto demos = collect_demos(*env, train, /*weak=*/false, derive_seed(cfg.seed, 4), cfg.workers);
    const auto samples = expand_demos(*env, train, demos);
    r = train_bc(*env, model, samples, val, cfg.bc, derive_seed(cfg.seed, 5), sink, cfg.workers);
  } else if (cfg.method == "ppo") {
    r = train_ppo(*env, model, train, val, cfg.ppo, derive_seed(cfg.seed, 6), sink, cfg.workers);
  } else {
    r = train_warmstart(*env, model, train, val, cfg, sink);
  }
  if (result) *result = std::move(r);
  return model;
}

}  // namespace gnarl::train
