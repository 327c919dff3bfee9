#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gnarl::nn {

/// Row-major dense matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  std::size_t size() const { return data.size(); }
};

/// A learnable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)), grad(value.rows, value.cols) {}
  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

/// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
};

/// Reverse-mode recording of one forward pass.
///
/// Values are computed eagerly; backward() replays the recorded adjoints in
/// reverse order and accumulates into Parameter::grad for parameter leaves.
class Tape {
 public:
  Var constant(Matrix m);
  Var param(Parameter& p);

  const Matrix& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  const Matrix& grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].grad; }

  /// Seeds d(out)/d(out) = 1 for a 1x1 output and propagates.
  void backward(Var out);

  // Dense algebra.
  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  /// a (m x n) plus a 1 x n row broadcast to every row.
  Var add_row(Var a, Var row);
  Var scale(Var a, double s);
  /// Multiplies row i by factors[i].
  Var scale_rows(Var a, std::vector<double> factors);
  Var relu(Var a);
  /// Euclidean norm of each row as an m x 1 column; gradient 0 at the origin.
  Var row_norm(Var a);

  // Graph gathers and scatters.
  Var gather_rows(Var a, std::vector<int> index);
  /// out[index[i]] += a[i]; rows never targeted stay zero.
  Var scatter_sum(Var a, std::vector<int> index, int out_rows);
  /// Elementwise max per target row; rows never targeted are zero.
  Var scatter_max(Var a, std::vector<int> index, int out_rows);
  /// Per-segment mean / max of consecutive row ranges [offsets[g], offsets[g+1]).
  Var segment_mean(Var a, std::vector<int> offsets);
  Var segment_max(Var a, std::vector<int> offsets);

  /// Log-softmax of an m x 1 column within segments, over allowed rows only.
  /// Disallowed rows get -inf (probability exactly zero) and no gradient.
  Var segment_log_softmax(Var logits, std::vector<int> offsets, std::vector<char> allowed);

  /// Triplet reduction: for message edge e = (u -> v) in segment s,
  /// out[e] = max over nodes w of segment s of
  ///   a[u] + b[v] + c[w] + e1[e] + e2[id(u, w)] + e3[id(w, v)]
  /// where id(x, y) is the message edge x -> y or -1 (contributes zero).
  struct TripletIndex {
    std::vector<int> src, dst, edge_segment;
    std::vector<int> node_offsets;       // segment node ranges
    std::vector<int> dense_offsets;      // start of each segment's n_s x n_s edge-id block
    std::vector<int> dense_ids;          // local (x, y) -> message edge id or -1
  };
  Var triplet_max(Var a, Var b, Var c, Var e1, Var e2, Var e3, const TripletIndex* index);

  // Scalar losses (1 x 1 outputs).
  Var sum(Var a);
  /// Weighted sum of 1 x 1 values.
  Var combine(std::vector<Var> xs, std::vector<double> weights);
  /// sum_i q_i (log q_i - logp_i) over rows with q_i > 0, scaled by `scale`.
  Var kl_div(Var logp, std::vector<double> target, double scale);
  /// -scale * sum over picked rows of logp.
  Var nll(Var logp, std::vector<int> rows, double scale);
  /// Clipped surrogate: -mean_i min(r_i A_i, clip(r_i, 1-eps, 1+eps) A_i) with
  /// r_i = exp(logp[rows_i] - old_logp_i).
  Var ppo_clip(Var logp, std::vector<int> rows, std::vector<double> old_logp, std::vector<double> advantages, double eps);
  /// mean_i (v_i - target_i)^2 over a column.
  Var mse(Var v, std::vector<double> target);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Parameter* param = nullptr;
    std::function<void()> backward;
  };

  Var push(Matrix value, Parameter* param = nullptr);
  Node& node(Var v) { return nodes_[static_cast<std::size_t>(v.id)]; }
  Matrix& g(Var v);

  std::vector<Node> nodes_;
};

}  // namespace gnarl::nn
