#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gnarl/features.hpp"
#include "gnarl/graph.hpp"

namespace gnarl {

/// Per-episode reference data computed once at reset (oracle solutions, budgets, seeds).
struct EpisodeContext {
  int start = -1;                   // v_s, when the environment has one
  std::vector<double> ref_distance;  // Bellman-Ford: reference shortest distances (inf if unreachable)
  double ref_mst_weight = 0.0;       // MST-Prim: reference spanning forest weight
  int budget = 0;                    // RGC: edge additions allowed
  std::uint64_t robustness_seed = 0; // RGC: common random numbers for F estimates
  double f0 = 0.0;                   // RGC: F(G_0)
  int initial_edges = 0;             // RGC: |E_0|
};

/// A problem instance: graph plus fixed input features.
struct Instance {
  std::shared_ptr<const Graph> graph;
  std::shared_ptr<const FeatureStore> inputs;
  std::uint64_t seed = 0;
  std::string id;
};

class Environment;

struct MdpState {
  std::shared_ptr<const Graph> graph;
  std::shared_ptr<const FeatureStore> inputs;
  FeatureStore state;
  std::shared_ptr<const EpisodeContext> context;
  int t = 0;
  int horizon = 0;
  double objective = 0.0;  // cached J(s); 0 when the environment has no objective

  const Graph& g() const { return *graph; }
  int node_count() const { return graph->node_count(); }
  /// 1-based phase, read from the categorical graph feature "p".
  int phase() const { return static_cast<int>(state.graph_value("p")) + 1; }
};

struct StepResult {
  MdpState next;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;
};

class InvalidAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One problem bound to the MDP contract. Implementations are immutable and shareable.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int phase_count() const = 0;
  virtual std::vector<FeatureSpec> input_schema() const = 0;
  virtual std::vector<FeatureSpec> state_schema() const = 0;
  virtual bool has_objective() const { return false; }

  /// Builds inputs for a raw graph: samples missing weights and the start node from `seed`.
  virtual Instance make_instance(const Graph& g, std::uint64_t seed, std::string id = {}) const = 0;

  /// Initial state; validates the instance inputs against input_schema().
  MdpState reset(const Instance& inst) const;

  virtual std::vector<char> mask(const MdpState& s) const = 0;
  virtual bool terminal(const MdpState& s) const = 0;
  /// J(s). Only meaningful when has_objective().
  virtual double objective(const MdpState&) const { return 0.0; }

  /// Whether the episode output in `s` is a correct solution (validator check).
  virtual bool solved(const MdpState& s) const = 0;
  /// Canonical text of the output in `s`, used for uniqueness counting and graph accuracy.
  virtual std::string canonical_solution(const MdpState& s) const = 0;
  /// Canonical text of one fixed reference output, when the problem has a reference algorithm.
  virtual std::optional<std::string> reference_solution(const Instance&) const { return std::nullopt; }

  /// Applies the transition in place. Callers go through step(), which checks the mask.
  virtual void transition(MdpState& s, int action) const = 0;

  std::vector<FeatureSpec> schema() const;

 protected:
  virtual std::shared_ptr<const EpisodeContext> make_context(const Instance& inst) const;
  virtual void init_state(MdpState& s) const = 0;
  virtual int horizon(const Graph& g, const EpisodeContext& ctx) const = 0;

  /// Schema entries for p and psi_1..psi_P (psi_1 only when `all_psi` is false).
  std::vector<FeatureSpec> phase_specs(bool all_psi = true) const;
  /// Adds every state_schema() feature zero-filled.
  void add_state_features(MdpState& s) const;
  /// Records the selection in psi_p (if present) and advances p.
  void advance_phase(MdpState& s, int action) const;
  static int start_node(const FeatureStore& inputs);
};

/// Checks the mask, applies the transition and computes reward and flags.
StepResult step(const Environment& env, const MdpState& s, int action);

/// Index of the single 1 of psi_m, or -1 when unset.
int selected_node(const MdpState& s, int phase);

// Policies and rollouts.

/// Distribution over all nodes for a state; masked nodes must receive zero mass.
using Policy = std::function<std::vector<double>(const MdpState&)>;

/// Distributions for several states at once (used by batched network evaluation).
using BatchPolicy = std::function<std::vector<std::vector<double>>(const std::vector<const MdpState*>&)>;

struct ActionMode {
  bool greedy = true;
  double temperature = 1.0;  // used when !greedy; 0 is routed to greedy

  static ActionMode greedy_mode() { return {}; }
  static ActionMode sample(double lambda) { return {lambda <= 0.0, lambda}; }
};

class Rng;

/// Picks an action from `probs` restricted to `mask`. Greedy ties go to the lowest index;
/// sampling uses probs^(1/lambda). Throws if no allowed action has positive mass.
int choose_action(const std::vector<double>& probs, const std::vector<char>& mask, const ActionMode& mode, Rng& rng);

struct Trajectory {
  std::string env;
  std::string graph_id;
  std::uint64_t seed = 0;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<std::vector<double>> probs;  // expert distributions; empty unless recorded
};

struct Episode {
  Trajectory trajectory;
  MdpState final_state;
  double initial_objective = 0.0;
  bool terminal = false;
  bool truncated = false;
  double total_reward() const;
  int length() const { return static_cast<int>(trajectory.actions.size()); }
};

struct RolloutOptions {
  ActionMode mode;
  std::uint64_t seed = 0;
  bool record_probs = false;
  std::uint64_t first_index = 0;  // rollout_batch: episode i uses derive_seed(seed, first_index + i)
};

Episode rollout(const Environment& env, const Instance& inst, const Policy& policy, const RolloutOptions& opts);

/// Runs one episode per instance in lockstep, evaluating the policy on all live states at once.
/// Episode i uses seed derive_seed(opts.seed, i); results equal per-episode rollout().
std::vector<Episode> rollout_batch(const Environment& env, const std::vector<Instance>& instances,
                                   const BatchPolicy& policy, const RolloutOptions& opts,
                                   int max_batch = 64);

/// Replays a trajectory's actions from the instance's initial state.
MdpState replay(const Environment& env, const Instance& inst, const std::vector<int>& actions);

/// Plain-text trajectory IO; ".gz" paths are compressed.
void save_trajectories(const std::vector<Trajectory>& ts, const std::filesystem::path& path);
std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);
std::string serialize_trajectories(const std::vector<Trajectory>& ts);
std::vector<Trajectory> parse_trajectories(const std::string& text);

}  // namespace gnarl
