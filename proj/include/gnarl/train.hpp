#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gnarl/environments.hpp"
#include "gnarl/families.hpp"
#include "gnarl/model.hpp"

namespace gnarl::train {

// Optimisation.

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::deque<nn::Parameter>& params, AdamConfig cfg);
  /// Applies one update from the accumulated gradients.
  void step();
  long steps() const { return t_; }

 private:
  std::deque<nn::Parameter>* params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  long t_ = 0;
};

/// Rescales all gradients so their global L2 norm is at most max_norm; returns the norm before.
double clip_grad_norm(std::deque<nn::Parameter>& params, double max_norm);

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration.

struct BcConfig {
  double lr = 1e-3;
  int batch = 16;
  int epochs = 20;
  int max_updates = 0;  // 0: no cap beyond epochs
  int eval_every = 100;
  double adam_eps = 1e-8;
};

struct PpoConfig {
  double lr = 5e-4;
  int batch = 64;
  long total_steps = 100000;
  int n_steps = 1024;   // transitions per collection window
  int n_envs = 8;       // episodes advanced in lockstep during collection
  int epochs = 10;
  double gamma = 1.0;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double vf_coef = 0.5;
  double ent_coef = 0.0;
  double max_grad_norm = 0.5;
  double adam_eps = 1e-5;
  bool normalize_advantage = true;
  int eval_every = 1;  // collection windows between validations
};

struct DataConfig {
  GraphFamily train;
  GraphFamily val;
  GraphFamily test;
  int train_graphs = 1000;  // graphs for PPO, or demo episodes for BC
  int val_graphs = 100;
  int test_graphs = 100;
};

struct TrainConfig {
  std::string name;
  std::string env;
  std::string method = "bc";  // bc | ppo | bc_then_ppo
  nn::ModelConfig model;
  BcConfig bc;
  PpoConfig ppo;
  DataConfig data;
  EnvOptions env_options;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Throws std::invalid_argument on inconsistent settings (including PPO on a reward-free environment).
void validate(const TrainConfig& cfg);

std::vector<std::string> preset_names();
/// The shipped per-domain presets; throws std::invalid_argument for unknown names.
TrainConfig preset(const std::string& name);

std::string to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const std::string& text);

// Data.

/// Instances from a family: graph i gets seed derive_seed(seed, i) and id "<prefix><i>".
std::vector<Instance> make_instances(const Environment& env, const std::vector<Graph>& graphs, std::uint64_t seed,
                                     const std::string& prefix = "g");

/// One supervised state: target distribution (KL) or, when empty, the single demo action (NLL).
struct DemoSample {
  MdpState state;
  std::vector<double> target;
  int action = -1;
};

/// Expert or weak-expert rollouts (greedy when `greedy`, else sampled from the expert).
std::vector<Trajectory> collect_demos(const Environment& env, const std::vector<Instance>& instances,
                                      bool weak, std::uint64_t seed, int workers = 1);
/// Replays trajectories into supervised states. Trajectories without probs give NLL samples.
std::vector<DemoSample> expand_demos(const Environment& env, const std::vector<Instance>& instances,
                                     const std::vector<Trajectory>& demos);

// Training.

struct ValidationScore {
  double success = 0.0;
  double reward = 0.0;
  double length = 0.0;
  /// Lexicographic: success, then mean reward, then shorter episodes.
  bool better_than(const ValidationScore& o) const;
};

ValidationScore validate_policy(const Environment& env, nn::Model& model, const std::vector<Instance>& val,
                                int workers = 1);

struct LogRecord {
  std::string phase;  // bc | ppo
  long step = 0;      // updates (bc) or environment steps (ppo)
  double loss = 0.0;
  ValidationScore score;
};
using LogSink = std::function<void(const LogRecord&)>;

std::string to_json(const LogRecord& r);

struct TrainResult {
  ValidationScore best;
  long updates = 0;
  long env_steps = 0;
  std::vector<LogRecord> log;
};

/// Minimises forward KL (or NLL for single-action samples) over shuffled minibatches and
/// keeps the best validation model. The critic is not trained.
TrainResult train_bc(const Environment& env, nn::Model& model, const std::vector<DemoSample>& demos,
                     const std::vector<Instance>& val, const BcConfig& cfg, std::uint64_t seed,
                     const LogSink& sink = {}, int workers = 1);

/// Clipped-surrogate PPO with GAE on episodes over uniformly sampled training instances.
TrainResult train_ppo(const Environment& env, nn::Model& model, const std::vector<Instance>& train,
                      const std::vector<Instance>& val, const PpoConfig& cfg, std::uint64_t seed,
                      const LogSink& sink = {}, int workers = 1);

/// One PPO collection window's advantages: GAE over `rewards` with per-step
/// `values`, `dones` (episode ended after this step) and `last_value` bootstrap; `last_done`
/// also ends the final step (no bootstrap).
void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                 const std::vector<char>& dones, double last_value, bool last_done, double gamma, double lambda,
                 std::vector<double>& advantages, std::vector<double>& returns);

/// BC on one weak-expert episode per training instance, then PPO with a freshly initialised critic.
TrainResult train_warmstart(const Environment& env, nn::Model& model, const std::vector<Instance>& train,
                            const std::vector<Instance>& val, const TrainConfig& cfg, const LogSink& sink = {});

/// Full pipeline for a config: data generation, demos, training. Returns the trained model.
nn::Model run_training(const TrainConfig& cfg, TrainResult* result = nullptr, const LogSink& sink = {});

}  // namespace gnarl::train
