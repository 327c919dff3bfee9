#include <map>
#include <stdexcept>

#include "gnarl/train.hpp"
#include "json.hpp"

namespace gnarl {

NLOHMANN_JSON_SERIALIZE_ENUM(RemovalStrategy, {{RemovalStrategy::random, "random"},
                                               {RemovalStrategy::targeted, "targeted"}})
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RgcOptions, strategy, samples, tau)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EnvOptions, rgc)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GraphFamily, kind, sizes, p_lo, p_hi, m_lo, m_hi, connected,
                                                directed)

namespace nn {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ModelConfig, processor, aggregation, pooling, layers, hidden,
                                                triplet_dim)
}

namespace train {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BcConfig, lr, batch, epochs, max_updates, eval_every, adam_eps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PpoConfig, lr, batch, total_steps, n_steps, n_envs, epochs, gamma,
                                                gae_lambda, clip, vf_coef, ent_coef, max_grad_norm, adam_eps,
                                                normalize_advantage, eval_every)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DataConfig, train, val, test, train_graphs, val_graphs, test_graphs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainConfig, name, env, method, model, bc, ppo, data, env_options,
                                                seed, workers)

namespace {

GraphFamily er(std::vector<int> sizes, double lo, double hi, bool connected = false) {
  GraphFamily f;
  f.kind = "er";
  f.sizes = std::move(sizes);
  f.p_lo = lo;
  f.p_hi = hi;
  f.connected = connected;
  return f;
}

GraphFamily ba(std::vector<int> sizes, int lo, int hi) {
  GraphFamily f;
  f.kind = "ba";
  f.sizes = std::move(sizes);
  f.m_lo = lo;
  f.m_hi = hi;
  return f;
}

GraphFamily euclid(std::vector<int> sizes) {
  GraphFamily f;
  f.kind = "euclidean";
  f.sizes = std::move(sizes);
  return f;
}

nn::ModelConfig model(const char* proc, const char* aggr, const char* pool, int layers) {
  nn::ModelConfig m;
  m.processor = proc;
  m.aggregation = aggr;
  m.pooling = pool;
  m.layers = layers;
  return m;
}

TrainConfig clrs(const std::string& name, nn::ModelConfig m, double lr, int batch, int demos, bool connected) {
  TrainConfig c;
  c.name = name;
  c.env = name;
  c.method = "bc";
  c.model = m;
  c.bc.lr = lr;
  c.bc.batch = batch;
  c.bc.epochs = 20;
  c.data.train = er({4, 7, 11, 13, 16}, 0.1, 0.9, connected);
  c.data.val = er({16}, 0.5, 0.5, connected);
  c.data.test = er({64}, 0.5, 0.5, connected);
  c.data.train_graphs = demos;
  return c;
}

TrainConfig tsp(const std::string& name, const std::string& method, nn::ModelConfig m) {
  TrainConfig c;
  c.name = name;
  c.env = "tsp";
  c.method = method;
  c.model = m;
  c.bc.epochs = 20;
  c.ppo.total_steps = 10000000;
  c.data.train = euclid({10, 13, 16, 19, 20});
  c.data.val = euclid({20});
  c.data.test = euclid({16});
  c.data.train_graphs = 50000;
  return c;
}

TrainConfig rgc(const std::string& name, bool ba_family, bool targeted, const std::string& method,
                nn::ModelConfig m) {
  TrainConfig c;
  c.name = name;
  c.env = "rgc";
  c.method = method;
  c.model = m;
  c.bc.epochs = 1;
  c.ppo.lr = 5e-4;
  c.ppo.total_steps = 10000000;
  c.env_options.rgc.strategy = targeted ? RemovalStrategy::targeted : RemovalStrategy::random;
  c.data.train = ba_family ? ba({20}, 2, 2) : er({20}, 0.2, 0.2, true);
  c.data.val = c.data.train;
  c.data.test = c.data.train;
  c.data.train_graphs = 10000;
  return c;
}

std::map<std::string, TrainConfig> build_presets() {
  std::map<std::string, TrainConfig> p;
  p["bfs"] = clrs("bfs", model("mpnn", "max", "mean", 2), 1e-3, 16, 1000, false);
  p["dfs"] = clrs("dfs", model("triplet", "sum", "mean", 5), 5e-4, 16, 1000, false);
  p["bellman_ford"] = clrs("bellman_ford", model("mpnn", "max", "mean", 4), 5e-2, 128, 10000, false);
  p["mst_prim"] = clrs("mst_prim", model("triplet", "max", "max", 3), 1e-3, 64, 10000, true);

  p["tsp_bc"] = tsp("tsp_bc", "bc", model("mpnn", "max", "max", 4));
  p["tsp_bc"].bc.lr = 1e-3;
  p["tsp_bc"].bc.batch = 64;
  p["tsp_ppo"] = tsp("tsp_ppo", "ppo", model("mpnn", "max", "max", 2));
  p["tsp_ppo"].ppo.lr = 5e-4;
  p["tsp_ppo"].ppo.batch = 32;
  p["tsp_we_ppo"] = tsp("tsp_we_ppo", "bc_then_ppo", model("mpnn", "max", "max", 2));
  p["tsp_we_ppo"].bc.lr = 1e-3;
  p["tsp_we_ppo"].bc.batch = 32;
  p["tsp_we_ppo"].bc.epochs = 1;
  p["tsp_we_ppo"].data.train_graphs = 100000;
  p["tsp_we_ppo"].ppo.lr = 5e-4;
  p["tsp_we_ppo"].ppo.batch = 32;
  p["tsp_we_ppo"].ppo.total_steps = 1000000;

  for (const char* name : {"mvc_bc", "mvc_ppo"}) {
    TrainConfig c;
    c.name = name;
    c.env = "mvc";
    c.data.train = ba({16}, 1, 10);
    c.data.val = c.data.train;
    c.data.test = c.data.train;
    c.data.train_graphs = 10000;
    c.bc.epochs = 10;
    c.ppo.total_steps = 10000000;
    p[name] = c;
  }
  p["mvc_bc"].method = "bc";
  p["mvc_bc"].model = model("mpnn", "sum", "max", 5);
  p["mvc_bc"].bc.lr = 1e-3;
  p["mvc_bc"].bc.batch = 8;
  p["mvc_ppo"].method = "ppo";
  p["mvc_ppo"].model = model("mpnn", "sum", "mean", 2);
  p["mvc_ppo"].ppo.lr = 5e-4;
  p["mvc_ppo"].ppo.batch = 64;

  struct Row {
    const char* name;
    bool ba, targeted, we;
    const char* pool;
    int layers;
    double bc_lr;
    int bc_batch, ppo_batch;
  };
  const Row rows[] = {
      {"rgc_ppo_ba_r", true, false, false, "mean", 4, 0, 0, 128},
      {"rgc_ppo_er_r", false, false, false, "mean", 4, 0, 0, 128},
      {"rgc_we_ppo_ba_r", true, false, true, "mean", 3, 1e-3, 8, 128},
      {"rgc_we_ppo_er_r", false, false, true, "max", 3, 1e-4, 8, 128},
      {"rgc_ppo_ba_t", true, true, false, "max", 2, 0, 0, 128},
      {"rgc_ppo_er_t", false, true, false, "mean", 2, 0, 0, 32},
      {"rgc_we_ppo_ba_t", true, true, true, "max", 2, 5e-2, 16, 128},
      {"rgc_we_ppo_er_t", false, true, true, "mean", 2, 5e-2, 8, 32},
  };
  for (const auto& r : rows) {
    TrainConfig c = rgc(r.name, r.ba, r.targeted, r.we ? "bc_then_ppo" : "ppo", model("mpnn", "sum", r.pool, r.layers));
    if (r.we) {
      c.bc.lr = r.bc_lr;
      c.bc.batch = r.bc_batch;
    }
    c.ppo.batch = r.ppo_batch;
    p[r.name] = c;
  }
  return p;
}

const std::map<std::string, TrainConfig>& presets() {
  static const auto p = build_presets();
  return p;
}

bool has_reward(const std::string& env) { return env == "tsp" || env == "mvc" || env == "rgc"; }

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, cfg] : presets()) out.push_back(name);
  return out;
}

TrainConfig preset(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw std::invalid_argument("unknown preset '" + name + "'");
  return it->second;
}

void validate(const TrainConfig& cfg) {
  const auto names = environment_names();
  if (std::find(names.begin(), names.end(), cfg.env) == names.end())
    throw std::invalid_argument("unknown environment '" + cfg.env + "'");
  if (cfg.method != "bc" && cfg.method != "ppo" && cfg.method != "bc_then_ppo")
    throw std::invalid_argument("method must be bc, ppo or bc_then_ppo");
  if (cfg.method != "bc" && !has_reward(cfg.env))
    throw std::invalid_argument("PPO needs a reward; " + cfg.env + " has no objective and trains with BC only");
  nn::validate(cfg.model);
  validate(cfg.data.train);
  validate(cfg.data.val);
  validate(cfg.data.test);
  if (cfg.bc.batch < 1 || cfg.bc.lr <= 0.0 || cfg.bc.epochs < 0 || cfg.bc.eval_every < 1)
    throw std::invalid_argument("invalid BC settings");
  if (cfg.ppo.batch < 1 || cfg.ppo.lr <= 0.0 || cfg.ppo.n_steps < 1 || cfg.ppo.n_envs < 1 || cfg.ppo.epochs < 1 ||
      cfg.ppo.total_steps < 0 || cfg.ppo.clip <= 0.0 || cfg.ppo.eval_every < 1)
    throw std::invalid_argument("invalid PPO settings");
  if (cfg.ppo.ent_coef != 0.0) throw std::invalid_argument("entropy bonus is not supported (ent_coef must be 0)");
  if (cfg.data.train_graphs < 1 || cfg.data.val_graphs < 1 || cfg.data.test_graphs < 0)
    throw std::invalid_argument("invalid data split sizes");
  if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
}

std::string to_json(const TrainConfig& cfg) { return nlohmann::json(cfg).dump(2); }

TrainConfig config_from_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<TrainConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid config: ") + e.what());
  }
}

std::string to_json(const LogRecord& r) {
  nlohmann::json j{{"phase", r.phase},
                   {"step", r.step},
                   {"loss", r.loss},
                   {"success", r.score.success},
                   {"mean_reward", r.score.reward},
                   {"mean_length", r.score.length}};
  return j.dump();
}

}  // namespace train
}  // namespace gnarl
