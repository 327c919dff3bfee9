// gnarl: dataset generation, demonstration collection, training, evaluation and reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gnarl/environments.hpp"
#include "gnarl/families.hpp"
#include "gnarl/kernels.hpp"
#include "gnarl/metrics.hpp"
#include "gnarl/model.hpp"
#include "gnarl/oracles.hpp"
#include "gnarl/rng.hpp"
#include "gnarl/train.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gnarl;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string env;
  std::string preset;
  std::string family;
  std::vector<int> sizes;
  std::vector<double> p_range;
  std::vector<int> m_range;
  bool connected = false;
  int count = -1;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string split = "train";
  std::string data;
  std::string checkpoint;
  bool weak = false;
  std::string method;
  long steps = -1;
  int updates = -1;
  int epochs = -1;
  int val_count = -1;
  std::vector<double> temperatures{0.0};
  int repeats = 1;
  int workers = 1;
  bool deterministic = false;
  bool resume = false;
  std::string out;
  std::string tag;
  std::string kernels;
};

fs::path output_dir(const Options& o, const std::string& fallback) {
  if (!o.out.empty()) return o.out;
  const char* root = std::getenv("GNARL_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "runs") / fallback;
}

int workers(const Options& o) { return o.deterministic ? 1 : std::max(1, o.workers); }

train::TrainConfig base_config(const Options& o) {
  train::TrainConfig cfg;
  if (!o.preset.empty()) {
    cfg = train::preset(o.preset);
  } else if (!o.env.empty()) {
    // Without a preset, pick the first preset of the environment as a base.
    for (const auto& name : train::preset_names()) {
      const auto p = train::preset(name);
      if (p.env == o.env) {
        cfg = p;
        break;
      }
    }
    if (cfg.env.empty()) throw UsageError("unknown environment '" + o.env + "'");
  } else {
    throw UsageError("either --preset or --env is required");
  }
  if (!o.env.empty() && o.env != cfg.env) throw UsageError("--env " + o.env + " conflicts with preset env " + cfg.env);
  if (o.seed_set) cfg.seed = o.seed;
  cfg.workers = workers(o);
  return cfg;
}

GraphFamily family_from(const Options& o, GraphFamily base) {
  if (!o.family.empty()) {
    if (o.family != base.kind) base = GraphFamily{};
    base.kind = o.family;
  }
  if (!o.sizes.empty()) base.sizes = o.sizes;
  if (o.p_range.size() == 1) base.p_lo = base.p_hi = o.p_range[0];
  if (o.p_range.size() == 2) base.p_lo = o.p_range[0], base.p_hi = o.p_range[1];
  if (o.m_range.size() == 1) base.m_lo = base.m_hi = o.m_range[0];
  if (o.m_range.size() == 2) base.m_lo = o.m_range[0], base.m_hi = o.m_range[1];
  if (o.connected) base.connected = true;
  try {
    validate(base);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return base;
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_run_config(const fs::path& dir, const std::string& command, const Options& o,
                      const train::TrainConfig* cfg) {
  json j;
  j["command"] = command;
  j["env"] = cfg ? cfg->env : o.env;
  j["preset"] = o.preset;
  j["data"] = o.data;
  j["checkpoint"] = o.checkpoint;
  j["output_dir"] = dir.string();
  j["seed"] = cfg ? cfg->seed : o.seed;
  j["workers"] = workers(o);
  j["deterministic"] = o.deterministic;
  j["kernels"] = std::string(kernels::active().name);
  if (cfg) j["train_config"] = json::parse(train::to_json(*cfg));
  write_json(dir / ("run_config_" + command + ".json"), j);
}

std::vector<Graph> load_graphs(const std::string& path) {
  try {
    return load_dataset(path);
  } catch (const DatasetError& e) {
    throw DataError(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

// gen: writes train/val/test splits (or one split when --split is given with a family).
int cmd_gen(const Options& o) {
  const auto cfg = base_config(o);
  const fs::path dir = output_dir(o, "gen-" + cfg.env);
  const fs::path data = dir / "data";
  fs::create_directories(data);
  struct Split {
    std::string name;
    GraphFamily family;
    int count;
    std::uint64_t seed;
  };
  std::vector<Split> splits{{"train", cfg.data.train, cfg.data.train_graphs, derive_seed(cfg.seed, 1)},
                            {"val", cfg.data.val, cfg.data.val_graphs, derive_seed(cfg.seed, 2)},
                            {"test", cfg.data.test, cfg.data.test_graphs, derive_seed(cfg.seed, 7)}};
  const bool custom = !o.family.empty() || !o.sizes.empty() || o.count >= 0;
  if (custom) {
    auto it = std::find_if(splits.begin(), splits.end(), [&](const Split& s) { return s.name == o.split; });
    if (it == splits.end()) throw UsageError("--split must be train, val or test");
    Split s = *it;
    s.family = family_from(o, s.family);
    if (o.count >= 0) s.count = o.count;
    splits = {s};
  }
  for (const auto& s : splits) {
    const fs::path path = data / (s.name + ".graphs");
    if (o.resume && fs::exists(path)) {
      std::cout << "kept " << path.string() << "\n";
      continue;
    }
    save_dataset(sample_graphs(s.family, s.count, s.seed), path);
    std::cout << "wrote " << path.string() << " (" << s.count << " graphs)\n";
  }
  write_run_config(dir, "gen", o, &cfg);
  return 0;
}

// collect: expert (or weak-expert) demonstrations over a dataset.
int cmd_collect(const Options& o) {
  const auto cfg = base_config(o);
  const auto env = make_environment(cfg.env, cfg.env_options);
  const fs::path dir = output_dir(o, "collect-" + cfg.env);
  fs::create_directories(dir);
  std::vector<Graph> graphs;
  if (!o.data.empty()) {
    graphs = load_graphs(o.data);
  } else {
    const int count = o.count >= 0 ? o.count : cfg.data.train_graphs;
    graphs = sample_graphs(family_from(o, cfg.data.train), count, derive_seed(cfg.seed, 1));
  }
  const auto instances = train::make_instances(*env, graphs, derive_seed(cfg.seed, 11), "train");
  const fs::path path = dir / (o.weak ? "demos_weak.traj.gz" : "demos.traj.gz");
  if (o.resume && fs::exists(path)) {
    std::cout << "kept " << path.string() << "\n";
    return 0;
  }
  const auto demos = train::collect_demos(*env, instances, o.weak, derive_seed(cfg.seed, 4), workers(o));
  save_trajectories(demos, path);
  json stats{{"episodes", demos.size()}};
  int valid = 0;
  for (std::size_t i = 0; i < demos.size(); ++i) {
    const MdpState s = replay(*env, instances[i], demos[i].actions);
    valid += env->terminal(s) && env->solved(s);
  }
  stats["valid_fraction"] = demos.empty() ? 0.0 : static_cast<double>(valid) / static_cast<double>(demos.size());
  if (cfg.env == "mvc") stats["truncation_ratio"] = mvc_truncation_ratio(*env, instances, derive_seed(cfg.seed, 5));
  write_json(dir / "collect_stats.json", stats);
  write_run_config(dir, "collect", o, &cfg);
  std::cout << "wrote " << path.string() << " " << stats.dump() << "\n";
  return 0;
}

int cmd_train(const Options& o) {
  auto cfg = base_config(o);
  if (!o.method.empty()) cfg.method = o.method;
  if (o.steps >= 0) cfg.ppo.total_steps = o.steps;
  if (o.updates >= 0) cfg.bc.max_updates = o.updates;
  if (o.epochs >= 0) cfg.bc.epochs = o.epochs;
  if (o.count >= 0) cfg.data.train_graphs = o.count;
  if (o.val_count >= 0) cfg.data.val_graphs = o.val_count;
  if (!o.family.empty() || !o.sizes.empty() || !o.p_range.empty() || !o.m_range.empty())
    cfg.data.train = family_from(o, cfg.data.train);
  try {
    train::validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = output_dir(o, "train-" + (cfg.name.empty() ? cfg.env : cfg.name));
  const fs::path ckpt = dir / "model.ckpt";
  if (fs::exists(ckpt)) {
    if (o.resume) {
      std::cout << "kept " << ckpt.string() << " (training already complete)\n";
      return 0;
    }
    throw UsageError(ckpt.string() + " exists; pass --resume to keep it or choose another --out");
  }
  fs::create_directories(dir);
  write_run_config(dir, "train", o, &cfg);
  write_text_file(dir / "config.json", train::to_json(cfg) + "\n");
  std::ofstream log(dir / "metrics.jsonl");
  train::TrainResult result;
  const auto sink = [&](const train::LogRecord& r) {
    log << train::to_json(r) << "\n";
    log.flush();
    std::cout << train::to_json(r) << "\n";
  };
  nn::Model model = train::run_training(cfg, &result, sink);
  nn::CheckpointMeta meta;
  meta.env = cfg.env;
  meta.extra_json = json{{"config", json::parse(train::to_json(cfg))},
                         {"updates", result.updates},
                         {"env_steps", result.env_steps},
                         {"best_success", result.best.success},
                         {"best_reward", result.best.reward}}
                        .dump();
  nn::save_checkpoint(model, meta, ckpt);
  std::cout << "wrote " << ckpt.string() << "\n";
  return 0;
}

int cmd_eval(const Options& o) {
  fs::path ckpt = o.checkpoint;
  if (ckpt.empty()) {
    if (o.out.empty()) throw UsageError("eval needs --checkpoint or --out pointing at a training run");
    ckpt = fs::path(o.out) / "model.ckpt";
  }
  if (!fs::exists(ckpt)) throw DataError("checkpoint not found: " + ckpt.string());
  nn::CheckpointMeta meta;
  nn::Model model = nn::load_checkpoint(ckpt, &meta);
  const std::string env_name = o.env.empty() ? meta.env : o.env;
  train::TrainConfig cfg;
  const json extra = json::parse(meta.extra_json);
  if (extra.contains("config")) cfg = train::config_from_json(extra["config"].dump());
  cfg.env = env_name;
  const auto env = make_environment(env_name, cfg.env_options);
  if (schema_hash(env->schema()) != model.schema_hash())
    throw nn::CheckpointError("checkpoint " + ckpt.string() + " was trained for '" + meta.env +
                              "' and does not match the " + env_name + " feature schema");

  std::vector<Graph> graphs;
  if (!o.data.empty()) {
    graphs = load_graphs(o.data);
  } else {
    const GraphFamily fam = family_from(o, cfg.data.test.sizes.empty() ? GraphFamily{} : cfg.data.test);
    const int count = o.count >= 0 ? o.count : cfg.data.test_graphs;
    const std::uint64_t seed = o.seed_set ? o.seed : cfg.seed;
    graphs = sample_graphs(fam, count, derive_seed(seed, 7));
  }
  const std::uint64_t seed = o.seed_set ? o.seed : cfg.seed;
  const auto instances = train::make_instances(*env, graphs, derive_seed(seed, 13), "test");
  EvalOptions eo;
  eo.temperatures = o.temperatures;
  eo.repeats = o.repeats;
  eo.seed = derive_seed(seed, 14);
  eo.workers = workers(o);
  if (env_name == "tsp") {
    bool small = true;
    for (const auto& g : graphs) small = small && g.node_count() <= kTspExactMaxNodes;
    if (small) eo.reference_objective = tsp_optimal_objective;
  } else if (env_name == "mvc") {
    eo.reference_objective = mvc_approx_objective;
  }
  const EvalReport report = evaluate(*env, instances, model.batch_policy(*env), eo);
  const fs::path dir = o.out.empty() ? ckpt.parent_path() : fs::path(o.out);
  fs::create_directories(dir);
  const std::string stem = o.tag.empty() ? "eval" : "eval_" + o.tag;
  if (o.resume && fs::exists(dir / (stem + ".json"))) {
    std::cout << "kept " << (dir / (stem + ".json")).string() << "\n";
    return 0;
  }
  write_text_file(dir / (stem + ".json"), report.to_json() + "\n");
  write_text_file(dir / (stem + ".csv"), report.to_csv());
  write_run_config(dir, "eval", o, &cfg);
  for (const auto& s : report.summaries) {
    std::cout << "temperature=" << s.temperature << " correctness=" << s.solution_correctness
              << " graph_accuracy=" << s.graph_accuracy << " objective=" << s.objective_mean;
    if (!std::isnan(s.ratio_mean)) std::cout << " ratio=" << s.ratio_mean;
    std::cout << " unique_mean=" << s.unique_mean << "\n";
  }
  return 0;
}

int cmd_report(const Options& o) {
  if (o.out.empty()) throw UsageError("report needs --out (a run directory)");
  const fs::path dir = o.out;
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> logs, evals;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name == "metrics.jsonl") logs.push_back(entry.path());
    if (name.rfind("eval", 0) == 0 && entry.path().extension() == ".json") evals.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());
  std::sort(evals.begin(), evals.end());
  if (logs.empty() && evals.empty())
    throw DataError("no metrics.jsonl or eval*.json under " + dir.string() + "; run train or eval first");

  std::ostringstream curve;
  curve << "run,phase,step,loss,success,mean_reward,mean_length\n";
  for (const auto& path : logs) {
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      curve << fs::relative(path.parent_path(), dir).string() << ',' << j.at("phase").get<std::string>() << ','
            << j.at("step").get<long>() << ',' << j.at("loss").get<double>() << ',' << j.at("success").get<double>()
            << ',' << j.at("mean_reward").get<double>() << ',' << j.at("mean_length").get<double>() << '\n';
    }
  }
  std::ostringstream table;
  table << "file,env,temperature,graphs,episodes,solution_correctness,graph_accuracy,objective_mean,objective_std,"
           "ratio_mean,ratio_std,unique_mean\n";
  auto cell = [](const json& v) { return v.is_null() ? std::string() : v.dump(); };
  for (const auto& path : evals) {
    const json j = json::parse(read_text_file(path));
    for (const auto& s : j.at("summaries")) {
      table << fs::relative(path, dir).string() << ',' << j.at("env").get<std::string>() << ','
            << s.at("temperature").dump() << ',' << s.at("graphs").dump() << ',' << s.at("episodes").dump() << ','
            << cell(s.at("solution_correctness")) << ',' << cell(s.at("graph_accuracy")) << ','
            << cell(s.at("objective_mean")) << ',' << cell(s.at("objective_std")) << ',' << cell(s.at("ratio_mean"))
            << ',' << cell(s.at("ratio_std")) << ',' << s.at("unique_mean").dump() << '\n';
    }
  }
  write_text_file(dir / "report_curves.csv", curve.str());
  write_text_file(dir / "report_eval.csv", table.str());
  std::cout << "wrote " << (dir / "report_curves.csv").string() << " and " << (dir / "report_eval.csv").string()
            << "\n";
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--env", o.env, "environment")->check(CLI::IsMember(environment_names()));
  cmd->add_option("--preset", o.preset, "training preset")->check(CLI::IsMember(train::preset_names()));
  cmd->add_option_function<std::uint64_t>("--seed", [&o](const std::uint64_t& s) {
    o.seed = s;
    o.seed_set = true;
  }, "random seed");
  cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--deterministic", o.deterministic, "single worker, reproducible output");
  cmd->add_flag("--resume", o.resume, "keep completed artifacts instead of recomputing them");
  cmd->add_option("--out", o.out, "run directory (default $GNARL_OUTPUT_ROOT/<command>-<name>)");
}

void add_family(CLI::App* cmd, Options& o) {
  cmd->add_option("--family", o.family, "graph family")->check(CLI::IsMember({"er", "ba", "euclidean"}));
  cmd->add_option("--sizes", o.sizes, "graph sizes")->delimiter(',');
  cmd->add_option("--p", o.p_range, "ER edge probability or range lo,hi")->delimiter(',')->expected(1, 2);
  cmd->add_option("--m", o.m_range, "BA attachment count or range lo,hi")->delimiter(',')->expected(1, 2);
  cmd->add_flag("--connected", o.connected, "resample ER graphs until connected");
  cmd->add_option("--count", o.count, "number of graphs")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gnarl: graph algorithms as MDPs, trained with imitation and PPO"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--kernels", o.kernels, "force the dense kernel variant")->check(CLI::IsMember({"scalar", "avx2"}));

  auto* gen = app.add_subcommand("gen", "generate train/val/test graph datasets");
  add_common(gen, o);
  add_family(gen, o);
  gen->add_option("--split", o.split, "split written when a custom family is given")
      ->check(CLI::IsMember({"train", "val", "test"}));

  auto* collect = app.add_subcommand("collect", "collect expert demonstrations");
  add_common(collect, o);
  add_family(collect, o);
  collect->add_option("--data", o.data, "dataset file (default: sample the preset's training family)");
  collect->add_flag("--weak", o.weak, "use the one-step greedy weak expert");

  auto* trn = app.add_subcommand("train", "train a policy");
  add_common(trn, o);
  add_family(trn, o);
  trn->add_option("--method", o.method, "override the training method")
      ->check(CLI::IsMember({"bc", "ppo", "bc_then_ppo"}));
  trn->add_option("--steps", o.steps, "PPO environment steps")->check(CLI::NonNegativeNumber);
  trn->add_option("--updates", o.updates, "cap on BC updates")->check(CLI::NonNegativeNumber);
  trn->add_option("--epochs", o.epochs, "BC epochs")->check(CLI::NonNegativeNumber);
  trn->add_option("--val-count", o.val_count, "validation graphs")->check(CLI::PositiveNumber);

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(ev, o);
  add_family(ev, o);
  ev->add_option("--checkpoint", o.checkpoint, "checkpoint path (default <out>/model.ckpt)");
  ev->add_option("--data", o.data, "dataset file (default: sample the run's test family)");
  ev->add_option("--temperatures", o.temperatures, "sampling temperatures; 0 is greedy")->delimiter(',');
  ev->add_option("--repeats", o.repeats, "episodes per graph per sampled temperature")->check(CLI::PositiveNumber);
  ev->add_option("--tag", o.tag, "output file suffix");

  auto* rep = app.add_subcommand("report", "condense run logs into plot-ready CSV");
  rep->add_option("--out", o.out, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (!o.kernels.empty() && !kernels::select(o.kernels)) throw UsageError("kernel variant unavailable: " + o.kernels);
    if (*gen) return cmd_gen(o);
    if (*collect) return cmd_collect(o);
    if (*trn) return cmd_train(o);
    if (*ev) return cmd_eval(o);
    if (*rep) return cmd_report(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const train::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DatasetError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const nn::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitData;
  } catch (const FeatureError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
