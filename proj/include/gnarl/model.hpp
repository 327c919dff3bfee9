#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include "gnarl/autodiff.hpp"
#include "gnarl/mdp.hpp"

namespace gnarl::nn {

/// One encoder input: a feature (or derived channel group) at a location with a raw width.
struct EncoderInput {
  std::string name;
  Location location = Location::node;
  int width = 1;
};

/// Encoder inputs derived from an environment schema. Every schema has an
/// edge "dir" channel (1 along the stored edge direction, 0 on reverse messages).
std::vector<EncoderInput> encoder_layout(const std::vector<FeatureSpec>& schema);

/// Several states concatenated into one disjoint graph.
struct GraphBatch {
  int graphs = 0;
  int nodes = 0;
  std::vector<int> node_offsets;  // graphs + 1
  std::vector<int> node_graph;
  // Directed message edges; each stored graph edge contributes both directions.
  std::vector<int> src, dst, edge_graph;
  std::vector<int> edge_offsets;  // graphs + 1
  // Raw inputs aligned with encoder_layout(): rows are nodes, message edges or graphs.
  std::vector<Matrix> inputs;
  std::vector<char> mask;
  Tape::TripletIndex triplet;  // filled when requested
};

GraphBatch build_batch(const Environment& env, const std::vector<const MdpState*>& states,
                       bool with_triplets);

struct ModelConfig {
  std::string processor = "mpnn";  // mpnn | triplet
  std::string aggregation = "max";  // sum | mean | max
  std::string pooling = "mean";    // mean | max
  int layers = 2;
  int hidden = 64;
  int triplet_dim = 8;
};

void validate(const ModelConfig& cfg);

/// Encode-process-decode actor-critic over the environment's feature schema.
///
/// The processor is shared by the actor and critic. The actor scores each node
/// by negative distance to a per-graph prototype computed from the pooled
/// embedding; the critic is an MLP on the pooled embedding.
class Model {
 public:
  Model(ModelConfig cfg, std::vector<FeatureSpec> schema, std::uint64_t seed);

  struct Output {
    Var logp;   // total_nodes x 1, -inf on masked nodes
    Var value;  // graphs x 1
  };
  Output forward(Tape& tape, const GraphBatch& batch);

  /// Log-probabilities and values without recording gradients for later use.
  struct Eval {
    std::vector<std::vector<double>> probs;
    std::vector<double> values;
  };
  Eval evaluate(const Environment& env, const std::vector<const MdpState*>& states);

  BatchPolicy batch_policy(const Environment& env);
  Policy policy(const Environment& env);

  const ModelConfig& config() const { return cfg_; }
  const std::vector<FeatureSpec>& schema() const { return schema_; }
  std::uint64_t schema_hash() const;

  std::deque<Parameter>& parameters() { return params_; }
  const std::deque<Parameter>& parameters() const { return params_; }
  std::size_t parameter_count() const;
  void zero_grad();

  /// Re-initialises the critic head from `seed` (used when PPO starts from a BC model).
  void reset_critic(std::uint64_t seed);

 private:
  struct Linear {
    int w = -1;
    int b = -1;
  };
  struct Layer {
    Linear recv, send, edge, graph, msg_out;
    Linear upd_self, upd_msg, upd_graph, upd_out;
    // Triplet variant.
    int t1 = -1, t2 = -1, t3 = -1, te1 = -1, te2 = -1, te3 = -1, tg = -1, tb = -1, to = -1;
  };

  int add_param(const std::string& name, int rows, int cols, double bound);
  Linear add_linear(const std::string& name, int in, int out, double bound, bool bias = true);
  void init_uniform(Parameter& p, double bound, gnarl::Rng& rng);
  Var linear(Tape& t, Var x, const Linear& l);
  Var aggregate(Tape& t, Var msgs, const GraphBatch& b);
  Var pool(Tape& t, Var x, const GraphBatch& b);
  void build(std::uint64_t seed);

  ModelConfig cfg_;
  std::vector<FeatureSpec> schema_;
  std::vector<EncoderInput> layout_;
  std::deque<Parameter> params_;
  std::vector<Linear> encoders_;
  std::vector<Layer> layers_;
  Linear proto_;
  Linear critic_hidden_, critic_out_;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckpointMeta {
  std::string env;
  std::string extra_json = "{}";  // caller-defined (training config, step counters)
};

void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::filesystem::path& path);

/// Loads a checkpoint, refusing it when `expected_schema` is given and differs.
Model load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta = nullptr,
                      const std::vector<FeatureSpec>* expected_schema = nullptr);

}  // namespace gnarl::nn
