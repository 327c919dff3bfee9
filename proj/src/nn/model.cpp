#include <cmath>
#include <stdexcept>

#include "gnarl/model.hpp"
#include "gnarl/rng.hpp"

namespace gnarl::nn {

void validate(const ModelConfig& cfg) {
  if (cfg.processor != "mpnn" && cfg.processor != "triplet")
    throw std::invalid_argument("model: processor must be mpnn or triplet, got " + cfg.processor);
  if (cfg.aggregation != "sum" && cfg.aggregation != "mean" && cfg.aggregation != "max")
    throw std::invalid_argument("model: aggregation must be sum, mean or max, got " + cfg.aggregation);
  if (cfg.pooling != "mean" && cfg.pooling != "max")
    throw std::invalid_argument("model: pooling must be mean or max, got " + cfg.pooling);
  if (cfg.layers < 1) throw std::invalid_argument("model: layers must be >= 1");
  if (cfg.hidden < 1) throw std::invalid_argument("model: hidden must be >= 1");
  if (cfg.triplet_dim < 1) throw std::invalid_argument("model: triplet_dim must be >= 1");
}

Model::Model(ModelConfig cfg, std::vector<FeatureSpec> schema, std::uint64_t seed)
    : cfg_(std::move(cfg)), schema_(std::move(schema)), layout_(encoder_layout(schema_)) {
  validate(cfg_);
  build(seed);
}

std::uint64_t Model::schema_hash() const { return gnarl::schema_hash(schema_); }

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void Model::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

int Model::add_param(const std::string& name, int rows, int cols, double) {
  params_.emplace_back(name, Matrix(rows, cols));
  return static_cast<int>(params_.size()) - 1;
}

void Model::init_uniform(Parameter& p, double bound, Rng& rng) {
  for (double& x : p.value.data) x = rng.uniform(-bound, bound);
  p.zero_grad();
}

Model::Linear Model::add_linear(const std::string& name, int in, int out, double bound, bool bias) {
  Linear l;
  l.w = add_param(name + ".W", in, out, bound);
  if (bias) l.b = add_param(name + ".b", 1, out, bound);
  return l;
}

void Model::build(std::uint64_t seed) {
  const int f = cfg_.hidden;
  const int d = cfg_.triplet_dim;
  std::vector<double> bounds;
  auto lin = [&](const std::string& name, int in, int out, double fan_in, bool bias = true) {
    Linear l = add_linear(name, in, out, 0.0, bias);
    const double bound = 1.0 / std::sqrt(fan_in);
    bounds.resize(params_.size(), bound);
    return l;
  };
  for (const auto& in : layout_)
    encoders_.push_back(lin("enc." + std::string(to_string(in.location)) + "." + in.name, in.width, f, in.width));
  for (int l = 0; l < cfg_.layers; ++l) {
    const std::string p = "proc" + std::to_string(l) + ".";
    Layer layer;
    layer.recv = lin(p + "msg.recv", f, f, 4.0 * f, false);
    layer.send = lin(p + "msg.send", f, f, 4.0 * f, false);
    layer.edge = lin(p + "msg.edge", f, f, 4.0 * f, false);
    layer.graph = lin(p + "msg.graph", f, f, 4.0 * f);
    layer.msg_out = lin(p + "msg.out", f, f, f);
    layer.upd_self = lin(p + "upd.self", f, f, 3.0 * f, false);
    layer.upd_msg = lin(p + "upd.msg", f, f, 3.0 * f, false);
    layer.upd_graph = lin(p + "upd.graph", f, f, 3.0 * f);
    layer.upd_out = lin(p + "upd.out", f, f, f);
    if (cfg_.processor == "triplet") {
      const double fan = 7.0 * f;
      layer.t1 = lin(p + "tri.n1", f, d, fan, false).w;
      layer.t2 = lin(p + "tri.n2", f, d, fan, false).w;
      layer.t3 = lin(p + "tri.n3", f, d, fan, false).w;
      layer.te1 = lin(p + "tri.e1", f, d, fan, false).w;
      layer.te2 = lin(p + "tri.e2", f, d, fan, false).w;
      layer.te3 = lin(p + "tri.e3", f, d, fan, false).w;
      Linear g = lin(p + "tri.g", f, d, fan);
      layer.tg = g.w;
      layer.tb = g.b;
      layer.to = lin(p + "tri.out", d, f, d, false).w;
    }
    layers_.push_back(layer);
  }
  proto_ = lin("actor.proto", f, f, f);
  critic_hidden_ = lin("critic.hidden", f, f, f);
  critic_out_ = lin("critic.out", f, 1, f);

  Rng rng(seed);
  for (std::size_t i = 0; i < params_.size(); ++i) init_uniform(params_[i], bounds[i], rng);
}

void Model::reset_critic(std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg_.hidden));
  for (int idx : {critic_hidden_.w, critic_hidden_.b, critic_out_.w, critic_out_.b})
    init_uniform(params_[static_cast<std::size_t>(idx)], bound, rng);
}

Var Model::linear(Tape& t, Var x, const Linear& l) {
  Var y = t.matmul(x, t.param(params_[static_cast<std::size_t>(l.w)]));
  if (l.b >= 0) y = t.add_row(y, t.param(params_[static_cast<std::size_t>(l.b)]));
  return y;
}

Var Model::aggregate(Tape& t, Var msgs, const GraphBatch& b) {
  if (cfg_.aggregation == "max") return t.scatter_max(msgs, b.dst, b.nodes);
  Var s = t.scatter_sum(msgs, b.dst, b.nodes);
  if (cfg_.aggregation == "sum") return s;
  std::vector<double> inv(static_cast<std::size_t>(b.nodes), 0.0);
  for (int v : b.dst) inv[static_cast<std::size_t>(v)] += 1.0;
  for (double& x : inv) x = x > 0.0 ? 1.0 / x : 1.0;
  return t.scale_rows(s, std::move(inv));
}

Var Model::pool(Tape& t, Var x, const GraphBatch& b) {
  if (cfg_.pooling == "max") return t.segment_max(x, b.node_offsets);
  return t.segment_mean(x, b.node_offsets);
}

Model::Output Model::forward(Tape& t, const GraphBatch& b) {
  const int f = cfg_.hidden;
  const int edges = static_cast<int>(b.src.size());
  if (b.inputs.size() != layout_.size()) throw std::invalid_argument("model: batch does not match encoder layout");

  Var x = t.constant(Matrix(b.nodes, f));
  Var ze = t.constant(Matrix(edges, f));
  Var zg = t.constant(Matrix(b.graphs, f));
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    Var enc = linear(t, t.constant(b.inputs[i]), encoders_[i]);
    switch (layout_[i].location) {
      case Location::node: x = t.add(x, enc); break;
      case Location::edge: ze = t.add(ze, enc); break;
      case Location::graph: zg = t.add(zg, enc); break;
    }
  }

  const bool triplet = cfg_.processor == "triplet";
  for (const Layer& L : layers_) {
    Var pre = t.add(t.gather_rows(linear(t, x, L.recv), b.dst), t.gather_rows(linear(t, x, L.send), b.src));
    pre = t.add(pre, linear(t, ze, L.edge));
    pre = t.add(pre, t.gather_rows(linear(t, zg, L.graph), b.edge_graph));
    if (triplet) {
      auto P = [&](int idx) { return t.param(params_[static_cast<std::size_t>(idx)]); };
      Var gterm = t.add_row(t.matmul(zg, P(L.tg)), P(L.tb));
      Var ta = t.add(t.matmul(x, P(L.t1)), t.gather_rows(gterm, b.node_graph));
      Var tb = t.matmul(x, P(L.t2));
      Var tc = t.matmul(x, P(L.t3));
      Var e1 = t.matmul(ze, P(L.te1));
      Var e2 = t.matmul(ze, P(L.te2));
      Var e3 = t.matmul(ze, P(L.te3));
      Var tri = t.triplet_max(ta, tb, tc, e1, e2, e3, &b.triplet);
      pre = t.add(pre, t.matmul(tri, P(L.to)));
    }
    Var msg = linear(t, t.relu(pre), L.msg_out);
    Var agg = aggregate(t, msg, b);
    Var h = t.add(linear(t, x, L.upd_self), linear(t, agg, L.upd_msg));
    h = t.add(h, t.gather_rows(linear(t, zg, L.upd_graph), b.node_graph));
    x = linear(t, t.relu(h), L.upd_out);
  }

  Var pooled = pool(t, x, b);
  Var proto = linear(t, pooled, proto_);
  Var dist = t.row_norm(t.sub(x, t.gather_rows(proto, b.node_graph)));
  Var logp = t.segment_log_softmax(t.scale(dist, -1.0), b.node_offsets, b.mask);
  Var value = linear(t, t.relu(linear(t, pooled, critic_hidden_)), critic_out_);
  return {logp, value};
}

Model::Eval Model::evaluate(const Environment& env, const std::vector<const MdpState*>& states) {
  Eval out;
  if (states.empty()) return out;
  GraphBatch b = build_batch(env, states, cfg_.processor == "triplet");
  Tape t;
  Output o = forward(t, b);
  const Matrix& lp = t.value(o.logp);
  const Matrix& v = t.value(o.value);
  for (int gi = 0; gi < b.graphs; ++gi) {
    std::vector<double> p;
    for (int i = b.node_offsets[static_cast<std::size_t>(gi)]; i < b.node_offsets[static_cast<std::size_t>(gi) + 1]; ++i)
      p.push_back(std::exp(lp(i, 0)));
    out.probs.push_back(std::move(p));
    out.values.push_back(v(gi, 0));
  }
  return out;
}

BatchPolicy Model::batch_policy(const Environment& env) {
  return [this, &env](const std::vector<const MdpState*>& states) { return evaluate(env, states).probs; };
}

Policy Model::policy(const Environment& env) {
  return [this, &env](const MdpState& s) { return evaluate(env, {&s}).probs.front(); };
}

}  // namespace gnarl::nn
