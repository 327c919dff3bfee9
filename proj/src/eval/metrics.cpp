#include "gnarl/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gnarl/environments.hpp"
#include "gnarl/oracles.hpp"
#include "gnarl/parallel.hpp"
#include "gnarl/rng.hpp"
#include "gnarl/validators.hpp"
#include "json.hpp"

namespace gnarl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  if (xs.empty()) {
    mean = sd = kNaN;
    return;
  }
  double s = 0.0;
  for (double x : xs) s += x;
  mean = s / static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - mean) * (x - mean);
  sd = xs.size() > 1 ? std::sqrt(v / static_cast<double>(xs.size() - 1)) : 0.0;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

}  // namespace

EvalReport evaluate(const Environment& env, const std::vector<Instance>& instances, const BatchPolicy& policy,
                    const EvalOptions& opts) {
  if (opts.repeats < 1) throw std::invalid_argument("evaluate: repeats must be >= 1");
  if (opts.temperatures.empty()) throw std::invalid_argument("evaluate: no temperatures");
  const int n = static_cast<int>(instances.size());

  std::vector<std::optional<std::string>> refs(instances.size());
  std::vector<double> ref_obj(instances.size(), kNaN);
  parallel_for(n, opts.workers, [&](int i) {
    refs[static_cast<std::size_t>(i)] = env.reference_solution(instances[static_cast<std::size_t>(i)]);
    if (opts.reference_objective)
      ref_obj[static_cast<std::size_t>(i)] = opts.reference_objective(instances[static_cast<std::size_t>(i)]);
  });

  EvalReport report;
  report.env = env.name();
  for (std::size_t ti = 0; ti < opts.temperatures.size(); ++ti) {
    const double lambda = opts.temperatures[ti];
    const ActionMode mode = ActionMode::sample(lambda);
    const int repeats = mode.greedy ? 1 : opts.repeats;
    std::vector<EvalRow> rows;
    for (int r = 0; r < repeats; ++r) {
      RolloutOptions ro;
      ro.mode = mode;
      ro.seed = derive_seed(derive_seed(opts.seed, ti), static_cast<std::uint64_t>(r));
      const int workers = std::max(1, std::min(opts.workers, n));
      std::vector<std::vector<Episode>> parts(static_cast<std::size_t>(workers));
      parallel_for(workers, workers, [&](int w) {
        const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
        const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        std::vector<Instance> chunk(instances.begin() + lo, instances.begin() + hi);
        RolloutOptions local = ro;
        local.first_index = static_cast<std::uint64_t>(lo);
        parts[static_cast<std::size_t>(w)] = rollout_batch(env, chunk, policy, local);
      });
      int i = 0;
      for (auto& part : parts) {
        for (auto& ep : part) {
          const Instance& inst = instances[static_cast<std::size_t>(i)];
          EvalRow row;
          row.graph_id = inst.id.empty() ? std::to_string(i) : inst.id;
          row.nodes = inst.graph->node_count();
          row.temperature = mode.greedy ? 0.0 : lambda;
          row.repeat = r;
          row.correct = ep.terminal && env.solved(ep.final_state);
          row.solution = env.canonical_solution(ep.final_state);
          row.has_reference = refs[static_cast<std::size_t>(i)].has_value();
          row.exact = row.has_reference && row.correct && *refs[static_cast<std::size_t>(i)] == row.solution;
          row.total_reward = ep.total_reward();
          row.objective = env.has_objective() ? ep.final_state.objective : row.total_reward;
          if (!std::isnan(ref_obj[static_cast<std::size_t>(i)])) {
            row.has_ratio = true;
            row.ratio = row.objective / ref_obj[static_cast<std::size_t>(i)];
          }
          row.length = ep.length();
          row.truncated = ep.truncated;
          rows.push_back(std::move(row));
          ++i;
        }
      }
    }

    EvalSummary s;
    s.temperature = mode.greedy ? 0.0 : lambda;
    s.episodes = static_cast<int>(rows.size());
    s.graphs = n;
    int correct = 0, exact = 0, with_ref = 0;
    std::vector<double> obj, ratio, rew, len;
    std::map<std::string, std::set<std::string>> unique;
    for (const auto& row : rows) {
      correct += row.correct;
      if (row.has_reference) {
        ++with_ref;
        exact += row.exact;
      }
      obj.push_back(row.objective);
      if (row.has_ratio) ratio.push_back(row.ratio);
      rew.push_back(row.total_reward);
      len.push_back(row.length);
      unique[row.graph_id].insert(row.solution);
    }
    s.solution_correctness = rows.empty() ? kNaN : static_cast<double>(correct) / static_cast<double>(rows.size());
    s.graph_accuracy = with_ref ? static_cast<double>(exact) / with_ref : kNaN;
    mean_std(obj, s.objective_mean, s.objective_std);
    mean_std(ratio, s.ratio_mean, s.ratio_std);
    double sd = 0.0;
    mean_std(rew, s.reward_mean, sd);
    mean_std(len, s.length_mean, sd);
    for (const auto& [id, sols] : unique) s.unique_total += static_cast<int>(sols.size());
    s.unique_mean = unique.empty() ? 0.0 : static_cast<double>(s.unique_total) / static_cast<double>(unique.size());
    report.summaries.push_back(s);
    report.rows.insert(report.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  return report;
}

std::string EvalReport::to_json() const {
  using nlohmann::json;
  auto val = [](double x) { return std::isnan(x) ? json(nullptr) : json(x); };
  json j;
  j["env"] = env;
  j["summaries"] = json::array();
  for (const auto& s : summaries) {
    j["summaries"].push_back({{"temperature", s.temperature},
                              {"episodes", s.episodes},
                              {"graphs", s.graphs},
                              {"solution_correctness", val(s.solution_correctness)},
                              {"graph_accuracy", val(s.graph_accuracy)},
                              {"objective_mean", val(s.objective_mean)},
                              {"objective_std", val(s.objective_std)},
                              {"ratio_mean", val(s.ratio_mean)},
                              {"ratio_std", val(s.ratio_std)},
                              {"reward_mean", val(s.reward_mean)},
                              {"length_mean", val(s.length_mean)},
                              {"unique_mean", s.unique_mean},
                              {"unique_total", s.unique_total}});
  }
  j["episodes"] = json::array();
  for (const auto& r : rows) {
    j["episodes"].push_back({{"graph_id", r.graph_id},
                             {"nodes", r.nodes},
                             {"temperature", r.temperature},
                             {"repeat", r.repeat},
                             {"correct", r.correct},
                             {"exact", r.has_reference ? json(r.exact) : json(nullptr)},
                             {"objective", r.objective},
                             {"ratio", r.has_ratio ? json(r.ratio) : json(nullptr)},
                             {"total_reward", r.total_reward},
                             {"length", r.length},
                             {"truncated", r.truncated}});
  }
  return j.dump(2);
}

std::string EvalReport::to_csv() const {
  std::ostringstream o;
  o << "env,graph_id,nodes,temperature,repeat,correct,exact,objective,ratio,total_reward,length,truncated\n";
  for (const auto& r : rows) {
    o << env << ',' << r.graph_id << ',' << r.nodes << ',' << num(r.temperature) << ',' << r.repeat << ','
      << r.correct << ',' << (r.has_reference ? (r.exact ? "1" : "0") : "") << ',' << num(r.objective) << ','
      << (r.has_ratio ? num(r.ratio) : "") << ',' << num(r.total_reward) << ',' << r.length << ','
      << r.truncated << '\n';
  }
  return o.str();
}

double tsp_optimal_objective(const Instance& inst) {
  const Graph& g = *inst.graph;
  if (g.node_count() > kTspExactMaxNodes) throw std::invalid_argument("tsp_optimal_objective: graph too large");
  return -tour_length(g, tsp_exact_tour(g));
}

double mvc_approx_objective(const Instance& inst) {
  const Graph& g = *inst.graph;
  std::vector<char> in(static_cast<std::size_t>(g.node_count()), 0);
  for (int v : mvc_approx(g)) in[static_cast<std::size_t>(v)] = 1;
  return -cover_weight(g, in);
}

double mvc_truncation_ratio(const Environment& mvc, const std::vector<Instance>& instances, std::uint64_t seed) {
  if (instances.empty()) throw std::invalid_argument("mvc_truncation_ratio: no instances");
  double total = 0.0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    const auto cover = mvc_approx(*inst.graph);
    std::vector<char> in(static_cast<std::size_t>(inst.graph->node_count()), 0);
    for (int v : cover) in[static_cast<std::size_t>(v)] = 1;
    const double j_approx = -cover_weight(*inst.graph, in);
    Policy uniform_over_cover = [&](const MdpState& s) {
      const auto m = mvc.mask(s);
      std::vector<double> p(m.size(), 0.0);
      int k = 0;
      for (int v : cover) k += m[static_cast<std::size_t>(v)] ? 1 : 0;
      for (int v : cover)
        if (m[static_cast<std::size_t>(v)]) p[static_cast<std::size_t>(v)] = 1.0 / k;
      return p;
    };
    RolloutOptions ro;
    ro.mode = ActionMode::sample(1.0);
    ro.seed = derive_seed(seed, i);
    const Episode ep = rollout(mvc, inst, uniform_over_cover, ro);
    total += j_approx == 0.0 ? 1.0 : ep.final_state.objective / j_approx;
  }
  return total / static_cast<double>(instances.size());
}

double pointer_micro_f1(const std::vector<int>& predicted, const std::vector<int>& reference) {
  if (predicted.size() != reference.size() || predicted.empty())
    throw std::invalid_argument("pointer_micro_f1: size mismatch");
  // Every node carries exactly one predicted and one true pointer, so micro precision,
  // recall and F1 coincide with per-node accuracy.
  int hit = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hit += predicted[i] == reference[i];
  return static_cast<double>(hit) / static_cast<double>(predicted.size());
}

double estimated_graph_accuracy(double micro_f1, int nodes) { return std::pow(micro_f1, nodes); }

}  // namespace gnarl
