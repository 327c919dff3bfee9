#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gnarl/mdp.hpp"

namespace gnarl {

/// One episode of an evaluation.
struct EvalRow {
  std::string graph_id;
  int nodes = 0;
  double temperature = 0.0;  // 0 means greedy
  int repeat = 0;
  bool correct = false;      // passes the environment's validator
  bool exact = false;        // matches the canonical reference output
  bool has_reference = false;
  double objective = 0.0;    // J(s_T), or total reward for environments without J
  double ratio = 0.0;        // J(s_T) / J_ref when a reference objective is configured
  bool has_ratio = false;
  double total_reward = 0.0;
  int length = 0;
  bool truncated = false;
  std::string solution;
};

struct EvalSummary {
  double temperature = 0.0;
  int episodes = 0;
  int graphs = 0;
  double solution_correctness = 0.0;
  double graph_accuracy = 0.0;  // over graphs with a reference; NaN if none
  double objective_mean = 0.0;
  double objective_std = 0.0;
  double ratio_mean = 0.0;      // NaN without a reference objective
  double ratio_std = 0.0;
  double reward_mean = 0.0;
  double length_mean = 0.0;
  double unique_mean = 0.0;     // mean over graphs of distinct solutions across repeats
  int unique_total = 0;
};

struct EvalReport {
  std::string env;
  std::vector<EvalRow> rows;
  std::vector<EvalSummary> summaries;

  std::string to_json() const;
  /// One row per graph x temperature x repeat, with a header line.
  std::string to_csv() const;
};

struct EvalOptions {
  std::vector<double> temperatures{0.0};
  int repeats = 1;  // sampled temperatures only; greedy runs once
  std::uint64_t seed = 0;
  int workers = 1;
  /// J_ref per instance for the ratio column; unset disables ratios.
  std::function<double(const Instance&)> reference_objective;
};

EvalReport evaluate(const Environment& env, const std::vector<Instance>& instances, const BatchPolicy& policy,
                    const EvalOptions& opts);

/// Reference objectives: -(optimal tour length), and -(Khuller approximation cover weight).
double tsp_optimal_objective(const Instance& inst);
double mvc_approx_objective(const Instance& inst);

/// Mean J/J_approx of the approximation algorithm run as a policy that picks uniformly among
/// its remaining cover nodes; episodes stop early when a subset already covers.
double mvc_truncation_ratio(const Environment& mvc, const std::vector<Instance>& instances, std::uint64_t seed);

/// Micro-F1 of predicted pointers against a reference labeling (equals per-node accuracy).
double pointer_micro_f1(const std::vector<int>& predicted, const std::vector<int>& reference);
/// Graph accuracy estimate micro-F1^|V| used for baselines reporting only node-level scores.
double estimated_graph_accuracy(double micro_f1, int nodes);

}  // namespace gnarl
