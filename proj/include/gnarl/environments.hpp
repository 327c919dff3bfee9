#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gnarl/mdp.hpp"
#include "gnarl/validators.hpp"

namespace gnarl {

/// BFS and DFS share features and the Alg. 1 transition; BFS adds the start node.
///
/// BFS phases are normalised so phase 1 picks an already reached parent and phase 2
/// an unreached child; pred_v <- psi_1 then builds the BFS tree top-down. The first
/// phase-1 action is forced to v_s. DFS additionally allows psi_1 in phase 2 so an
/// exhausted or isolated root can mark itself reached.
class SearchEnvironment final : public Environment {
 public:
  explicit SearchEnvironment(bool breadth_first) : bfs_(breadth_first) {}

  std::string name() const override { return bfs_ ? "bfs" : "dfs"; }
  int phase_count() const override { return 2; }
  std::vector<FeatureSpec> input_schema() const override;
  std::vector<FeatureSpec> state_schema() const override;
  Instance make_instance(const Graph& g, std::uint64_t seed, std::string id = {}) const override;
  std::vector<char> mask(const MdpState& s) const override;
  bool terminal(const MdpState& s) const override;
  bool solved(const MdpState& s) const override;
  std::string canonical_solution(const MdpState& s) const override;
  std::optional<std::string> reference_solution(const Instance& inst) const override;
  void transition(MdpState& s, int action) const override;

  bool breadth_first() const { return bfs_; }

 protected:
  void init_state(MdpState& s) const override;
  int horizon(const Graph& g, const EpisodeContext&) const override { return 2 * (g.node_count() - 1); }

 private:
  bool bfs_;
};

class BellmanFordEnvironment final : public Environment {
 public:
  std::string name() const override { return "bellman_ford"; }
  int phase_count() const override { return 2; }
  std::vector<FeatureSpec> input_schema() const override;
  std::vector<FeatureSpec> state_schema() const override;
  Instance make_instance(const Graph& g, std::uint64_t seed, std::string id = {}) const override;
  std::vector<char> mask(const MdpState& s) const override;
  bool terminal(const MdpState& s) const override;
  bool solved(const MdpState& s) const override;
  std::string canonical_solution(const MdpState& s) const override;
  std::optional<std::string> reference_solution(const Instance& inst) const override;
  void transition(MdpState& s, int action) const override;

 protected:
  std::shared_ptr<const EpisodeContext> make_context(const Instance& inst) const override;
  void init_state(MdpState& s) const override;
  int horizon(const Graph& g, const EpisodeContext&) const override {
    return 2 * (g.node_count() - 1) * g.edge_count();
  }
};

class MstPrimEnvironment final : public Environment {
 public:
  std::string name() const override { return "mst_prim"; }
  int phase_count() const override { return 2; }
  std::vector<FeatureSpec> input_schema() const override;
  std::vector<FeatureSpec> state_schema() const override;
  Instance make_instance(const Graph& g, std::uint64_t seed, std::string id = {}) const override;
  std::vector<char> mask(const MdpState& s) const override;
  bool terminal(const MdpState& s) const override;
  bool solved(const MdpState& s) const override;
  std::string canonical_solution(const MdpState& s) const override;
  std::optional<std::string> reference_solution(const Instance& inst) const override;
  void transition(MdpState& s, int action) const override;

 protected:
  std::shared_ptr<const EpisodeContext> make_context(const Instance& inst) const override;
  void init_state(MdpState& s) const override;
  int horizon(const Graph& g, const EpisodeContext&) const override {
    return 2 * g.node_count() * g.node_count();
  }
};

class TspEnvironment final : public Environment {
 public:
  std::string name() const override { return "tsp"; }
  int phase_count() const override { return 1; }
  bool has_objective() const override { return true; }
  std::vector<FeatureSpec> input_schema() const override;
  std::vector<FeatureSpec> state_schema() const override;
  Instance make_instance(const Graph& g, std::uint64_t seed, std::string id = {}) const override;
  std::vector<char> mask(const MdpState& s) const override;
  bool terminal(const MdpState& s) const override;
  /// Negative length of the partial tour closed back to v_s.
  double objective(const MdpState& s) const override;
  bool solved(const MdpState& s) const override;
  std::string canonical_solution(const MdpState& s) const override;
  std::optional<std::string> reference_solution(const Instance& inst) const override;
  void transition(MdpState& s, int action) const override;

  /// Tour in visiting order starting at v_s, read from the successor pointers.
  static std::vector<int> tour(const MdpState& s);
  /// Rotation- and reflection-normalised cycle text.
  static std::string canonical_cycle(std::vector<int> tour);

 protected:
  void init_state(MdpState& s) const override;
  int horizon(const Graph& g, const EpisodeContext&) const override { return g.node_count(); }
};

class MvcEnvironment final : public Environment {
 public:
  std::string name() const override { return "mvc"; }
  int phase_count() const override { return 1; }
  bool has_objective() const override { return true; }
  std::vector<FeatureSpec> input_schema() const override;
  std::vector<FeatureSpec> state_schema() const override;
  Instance make_instance(const Graph& g, std::uint64_t seed, std::string id = {}) const override;
  std::vector<char> mask(const MdpState& s) const override;
  bool terminal(const MdpState& s) const override;
  double objective(const MdpState& s) const override;
  bool solved(const MdpState& s) const override;
  std::string canonical_solution(const MdpState& s) const override;
  std::optional<std::string> reference_solution(const Instance& inst) const override;
  void transition(MdpState& s, int action) const override;

  static std::vector<char> cover(const MdpState& s);

 protected:
  void init_state(MdpState& s) const override;
  int horizon(const Graph& g, const EpisodeContext&) const override { return g.node_count(); }
};

struct RgcOptions {
  RemovalStrategy strategy = RemovalStrategy::random;
  int samples = 500;  // keeps the standard error of F below 0.01 at |V| = 20
  double tau = 0.05;
};

/// Robust graph construction: add `budget` edges (two phases each) to maximise F(G).
///
/// J(s) = F(G_t) - F(G_0) where F under random removal uses one fixed set of removal
/// orders per episode, so step rewards telescope exactly.
class RgcEnvironment final : public Environment {
 public:
  explicit RgcEnvironment(RgcOptions opts = {}) : opts_(opts) {}

  std::string name() const override { return "rgc"; }
  int phase_count() const override { return 2; }
  bool has_objective() const override { return true; }
  std::vector<FeatureSpec> input_schema() const override { return {}; }
  std::vector<FeatureSpec> state_schema() const override;
  Instance make_instance(const Graph& g, std::uint64_t seed, std::string id = {}) const override;
  std::vector<char> mask(const MdpState& s) const override;
  bool terminal(const MdpState& s) const override;
  double objective(const MdpState& s) const override;
  bool solved(const MdpState& s) const override { return terminal(s); }
  std::string canonical_solution(const MdpState& s) const override;
  void transition(MdpState& s, int action) const override;

  const RgcOptions& options() const { return opts_; }
  int budget(int n) const;
  /// F(g) with the episode's removal orders.
  double robustness_of(const Graph& g, const EpisodeContext& ctx) const;
  /// Edges added so far.
  static int added(const MdpState& s) { return s.g().edge_count() - s.context->initial_edges; }

 protected:
  std::shared_ptr<const EpisodeContext> make_context(const Instance& inst) const override;
  void init_state(MdpState& s) const override;
  int horizon(const Graph&, const EpisodeContext& ctx) const override { return 2 * ctx.budget; }

 private:
  RgcOptions opts_;
};

struct EnvOptions {
  RgcOptions rgc;
};

/// Stable CLI identifiers: bfs, dfs, bellman_ford, mst_prim, tsp, mvc, rgc.
std::shared_ptr<const Environment> make_environment(const std::string& name, const EnvOptions& opts = {});
std::vector<std::string> environment_names();

/// Space-separated integers; the canonical text of pointer outputs.
std::string join_ints(const std::vector<int>& xs);
std::vector<int> pointer_values(const MdpState& s, const std::string& feature = "pred");

}  // namespace gnarl
