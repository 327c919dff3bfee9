#include "gnarl/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gnarl/kernels.hpp"

namespace gnarl::nn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

Var Tape::push(Matrix value, Parameter* param) {
  Node n;
  n.value = std::move(value);
  n.param = param;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Matrix& Tape::g(Var v) {
  Node& n = node(v);
  if (n.grad.size() != n.value.size()) n.grad = Matrix(n.value.rows, n.value.cols);
  return n.grad;
}

Var Tape::constant(Matrix m) { return push(std::move(m)); }

Var Tape::param(Parameter& p) {
  Var v = push(p.value, &p);
  node(v).backward = [this, v] {
    Node& n = node(v);
    const auto& k = kernels::active();
    k.axpy(static_cast<int>(n.grad.size()), 1.0, n.grad.data.data(), n.param->grad.data.data());
  };
  return v;
}

void Tape::backward(Var out) {
  require(value(out).rows == 1 && value(out).cols == 1, "backward: output must be 1x1");
  for (auto& n : nodes_) n.grad = Matrix();
  g(out).data[0] = 1.0;
  for (int i = out.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.size() == 0 || !n.backward) continue;
    n.backward();
  }
}

Var Tape::matmul(Var a, Var b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  require(A.cols == B.rows, "matmul: shape mismatch");
  Matrix C(A.rows, B.cols);
  if (A.rows > 0 && B.cols > 0 && A.cols > 0)
    kernels::active().gemm_nn(A.rows, B.cols, A.cols, A.data.data(), A.cols, B.data.data(), B.cols,
                              C.data.data(), C.cols);
  Var c = push(std::move(C));
  node(c).backward = [this, a, b, c] {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    const Matrix& dC = node(c).grad;
    const int m = A.rows, k = A.cols, n = B.cols;
    if (m == 0 || k == 0 || n == 0) return;
    const auto& kt = kernels::active();
    kt.gemm_nt(m, k, n, dC.data.data(), n, B.data.data(), n, g(a).data.data(), k);
    kt.gemm_tn(k, n, m, A.data.data(), k, dC.data.data(), n, g(b).data.data(), n);
  };
  return c;
}

Var Tape::add(Var a, Var b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  require(A.rows == B.rows && A.cols == B.cols, "add: shape mismatch");
  Matrix C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] += B.data[i];
  Var c = push(std::move(C));
  node(c).backward = [this, a, b, c] {
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (std::size_t i = 0; i < dC.size(); ++i) dA.data[i] += dC.data[i];
    Matrix& dB = g(b);
    for (std::size_t i = 0; i < dC.size(); ++i) dB.data[i] += dC.data[i];
  };
  return c;
}

Var Tape::sub(Var a, Var b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  require(A.rows == B.rows && A.cols == B.cols, "sub: shape mismatch");
  Matrix C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] -= B.data[i];
  Var c = push(std::move(C));
  node(c).backward = [this, a, b, c] {
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (std::size_t i = 0; i < dC.size(); ++i) dA.data[i] += dC.data[i];
    Matrix& dB = g(b);
    for (std::size_t i = 0; i < dC.size(); ++i) dB.data[i] -= dC.data[i];
  };
  return c;
}

Var Tape::add_row(Var a, Var row) {
  const Matrix& A = value(a);
  const Matrix& R = value(row);
  require(R.rows == 1 && R.cols == A.cols, "add_row: shape mismatch");
  Matrix C = A;
  for (int i = 0; i < C.rows; ++i)
    for (int j = 0; j < C.cols; ++j) C(i, j) += R.data[static_cast<std::size_t>(j)];
  Var c = push(std::move(C));
  node(c).backward = [this, a, row, c] {
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (std::size_t i = 0; i < dC.size(); ++i) dA.data[i] += dC.data[i];
    Matrix& dR = g(row);
    for (int i = 0; i < dC.rows; ++i)
      for (int j = 0; j < dC.cols; ++j) dR.data[static_cast<std::size_t>(j)] += dC(i, j);
  };
  return c;
}

Var Tape::scale(Var a, double s) {
  Matrix C = value(a);
  for (double& x : C.data) x *= s;
  Var c = push(std::move(C));
  node(c).backward = [this, a, c, s] {
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (std::size_t i = 0; i < dC.size(); ++i) dA.data[i] += s * dC.data[i];
  };
  return c;
}

Var Tape::scale_rows(Var a, std::vector<double> factors) {
  const Matrix& A = value(a);
  require(static_cast<int>(factors.size()) == A.rows, "scale_rows: size mismatch");
  Matrix C = A;
  for (int i = 0; i < C.rows; ++i)
    for (int j = 0; j < C.cols; ++j) C(i, j) *= factors[static_cast<std::size_t>(i)];
  Var c = push(std::move(C));
  node(c).backward = [this, a, c, f = std::move(factors)] {
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (int i = 0; i < dC.rows; ++i)
      for (int j = 0; j < dC.cols; ++j) dA(i, j) += f[static_cast<std::size_t>(i)] * dC(i, j);
  };
  return c;
}

Var Tape::relu(Var a) {
  Matrix C = value(a);
  for (double& x : C.data) x = x > 0.0 ? x : 0.0;
  Var c = push(std::move(C));
  node(c).backward = [this, a, c] {
    const Matrix& A = value(a);
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (std::size_t i = 0; i < dC.size(); ++i)
      if (A.data[i] > 0.0) dA.data[i] += dC.data[i];
  };
  return c;
}

Var Tape::row_norm(Var a) {
  const Matrix& A = value(a);
  Matrix C(A.rows, 1);
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.cols; ++j) s += A(i, j) * A(i, j);
    C(i, 0) = std::sqrt(s);
  }
  Var c = push(std::move(C));
  node(c).backward = [this, a, c] {
    const Matrix& A = value(a);
    const Matrix& Y = value(c);
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (int i = 0; i < A.rows; ++i) {
      if (Y(i, 0) == 0.0) continue;
      const double f = dC(i, 0) / Y(i, 0);
      for (int j = 0; j < A.cols; ++j) dA(i, j) += f * A(i, j);
    }
  };
  return c;
}

Var Tape::gather_rows(Var a, std::vector<int> index) {
  const Matrix& A = value(a);
  Matrix C(static_cast<int>(index.size()), A.cols);
  for (int i = 0; i < C.rows; ++i) {
    const int r = index[static_cast<std::size_t>(i)];
    require(r >= 0 && r < A.rows, "gather_rows: index out of range");
    std::copy(A.row(r), A.row(r) + A.cols, C.row(i));
  }
  Var c = push(std::move(C));
  node(c).backward = [this, a, c, idx = std::move(index)] {
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (int i = 0; i < dC.rows; ++i) {
      double* dst = dA.row(idx[static_cast<std::size_t>(i)]);
      const double* src = dC.row(i);
      for (int j = 0; j < dC.cols; ++j) dst[j] += src[j];
    }
  };
  return c;
}

Var Tape::scatter_sum(Var a, std::vector<int> index, int out_rows) {
  const Matrix& A = value(a);
  require(static_cast<int>(index.size()) == A.rows, "scatter_sum: size mismatch");
  Matrix C(out_rows, A.cols);
  for (int i = 0; i < A.rows; ++i) {
    const int r = index[static_cast<std::size_t>(i)];
    require(r >= 0 && r < out_rows, "scatter_sum: index out of range");
    double* dst = C.row(r);
    const double* src = A.row(i);
    for (int j = 0; j < A.cols; ++j) dst[j] += src[j];
  }
  Var c = push(std::move(C));
  node(c).backward = [this, a, c, idx = std::move(index)] {
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (int i = 0; i < dA.rows; ++i) {
      const double* src = dC.row(idx[static_cast<std::size_t>(i)]);
      double* dst = dA.row(i);
      for (int j = 0; j < dA.cols; ++j) dst[j] += src[j];
    }
  };
  return c;
}

Var Tape::scatter_max(Var a, std::vector<int> index, int out_rows) {
  const Matrix& A = value(a);
  require(static_cast<int>(index.size()) == A.rows, "scatter_max: size mismatch");
  Matrix C(out_rows, A.cols, kNegInf);
  std::vector<int> arg(static_cast<std::size_t>(out_rows) * A.cols, -1);
  for (int i = 0; i < A.rows; ++i) {
    const int r = index[static_cast<std::size_t>(i)];
    require(r >= 0 && r < out_rows, "scatter_max: index out of range");
    for (int j = 0; j < A.cols; ++j) {
      if (A(i, j) > C(r, j)) {
        C(r, j) = A(i, j);
        arg[static_cast<std::size_t>(r) * A.cols + j] = i;
      }
    }
  }
  for (std::size_t i = 0; i < C.size(); ++i)
    if (arg[i] < 0) C.data[i] = 0.0;
  Var c = push(std::move(C));
  node(c).backward = [this, a, c, arg = std::move(arg)] {
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (int r = 0; r < dC.rows; ++r)
      for (int j = 0; j < dC.cols; ++j) {
        const int i = arg[static_cast<std::size_t>(r) * dC.cols + j];
        if (i >= 0) dA(i, j) += dC(r, j);
      }
  };
  return c;
}

Var Tape::segment_mean(Var a, std::vector<int> offsets) {
  const Matrix& A = value(a);
  const int segs = static_cast<int>(offsets.size()) - 1;
  require(segs >= 0 && offsets.back() == A.rows, "segment_mean: bad offsets");
  Matrix C(segs, A.cols);
  for (int s = 0; s < segs; ++s) {
    const int lo = offsets[static_cast<std::size_t>(s)], hi = offsets[static_cast<std::size_t>(s) + 1];
    if (hi == lo) continue;
    for (int i = lo; i < hi; ++i)
      for (int j = 0; j < A.cols; ++j) C(s, j) += A(i, j);
    for (int j = 0; j < A.cols; ++j) C(s, j) /= (hi - lo);
  }
  Var c = push(std::move(C));
  node(c).backward = [this, a, c, off = std::move(offsets)] {
    const Matrix& dC = node(c).grad;
    Matrix& dA = g(a);
    for (int s = 0; s + 1 < static_cast<int>(off.size()); ++s) {
      const int lo = off[static_cast<std::size_t>(s)], hi = off[static_cast<std::size_t>(s) + 1];
      if (hi == lo) continue;
      const double inv = 1.0 / (hi - lo);
      for (int i = lo; i < hi; ++i)
        for (int j = 0; j < dC.cols; ++j) dA(i, j) += inv * dC(s, j);
    }
  };
  return c;
}

Var Tape::segment_max(Var a, std::vector<int> offsets) {
  const Matrix& A = value(a);
  const int segs = static_cast<int>(offsets.size()) - 1;
  require(segs >= 0 && offsets.back() == A.rows, "segment_max: bad offsets");
  std::vector<int> seg_of(static_cast<std::size_t>(A.rows));
  for (int s = 0; s < segs; ++s)
    for (int i = offsets[static_cast<std::size_t>(s)]; i < offsets[static_cast<std::size_t>(s) + 1]; ++i)
      seg_of[static_cast<std::size_t>(i)] = s;
  return scatter_max(a, std::move(seg_of), segs);
}

Var Tape::segment_log_softmax(Var logits, std::vector<int> offsets, std::vector<char> allowed) {
  const Matrix& X = value(logits);
  require(X.cols == 1, "segment_log_softmax: expects a column");
  require(static_cast<int>(allowed.size()) == X.rows, "segment_log_softmax: mask size mismatch");
  require(!offsets.empty() && offsets.back() == X.rows, "segment_log_softmax: bad offsets");
  Matrix Y(X.rows, 1, kNegInf);
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    double mx = kNegInf;
    for (int i = offsets[s]; i < offsets[s + 1]; ++i)
      if (allowed[static_cast<std::size_t>(i)]) mx = std::max(mx, X(i, 0));
    if (mx == kNegInf) continue;
    double z = 0.0;
    for (int i = offsets[s]; i < offsets[s + 1]; ++i)
      if (allowed[static_cast<std::size_t>(i)]) z += std::exp(X(i, 0) - mx);
    const double lse = mx + std::log(z);
    for (int i = offsets[s]; i < offsets[s + 1]; ++i)
      if (allowed[static_cast<std::size_t>(i)]) Y(i, 0) = X(i, 0) - lse;
  }
  Var y = push(std::move(Y));
  node(y).backward = [this, logits, y, off = std::move(offsets), mask = std::move(allowed)] {
    const Matrix& Yv = value(y);
    const Matrix& dY = node(y).grad;
    Matrix& dX = g(logits);
    for (std::size_t s = 0; s + 1 < off.size(); ++s) {
      double total = 0.0;
      for (int i = off[s]; i < off[s + 1]; ++i)
        if (mask[static_cast<std::size_t>(i)]) total += dY(i, 0);
      for (int i = off[s]; i < off[s + 1]; ++i)
        if (mask[static_cast<std::size_t>(i)]) dX(i, 0) += dY(i, 0) - std::exp(Yv(i, 0)) * total;
    }
  };
  return y;
}

Var Tape::triplet_max(Var a, Var b, Var c, Var e1, Var e2, Var e3, const TripletIndex* index) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  const Matrix& Cn = value(c);
  const Matrix& E1 = value(e1);
  const Matrix& E2 = value(e2);
  const Matrix& E3 = value(e3);
  const TripletIndex& ix = *index;
  const int m = static_cast<int>(ix.src.size());
  const int d = A.cols;
  require(E1.rows == m && E2.rows == m && E3.rows == m, "triplet_max: edge rows mismatch");
  require(B.cols == d && Cn.cols == d && E1.cols == d && E2.cols == d && E3.cols == d,
          "triplet_max: width mismatch");
  Matrix out(m, d);
  std::vector<int> arg(static_cast<std::size_t>(m) * d, -1);
  std::vector<double> acc(static_cast<std::size_t>(d));
  for (int e = 0; e < m; ++e) {
    const int u = ix.src[static_cast<std::size_t>(e)];
    const int v = ix.dst[static_cast<std::size_t>(e)];
    const int s = ix.edge_segment[static_cast<std::size_t>(e)];
    const int lo = ix.node_offsets[static_cast<std::size_t>(s)];
    const int hi = ix.node_offsets[static_cast<std::size_t>(s) + 1];
    const int ns = hi - lo;
    const int* dense = ix.dense_ids.data() + ix.dense_offsets[static_cast<std::size_t>(s)];
    const int lu = u - lo, lv = v - lo;
    double* o = out.row(e);
    for (int k = 0; k < d; ++k) acc[static_cast<std::size_t>(k)] = A(u, k) + B(v, k) + E1(e, k);
    for (int w = lo; w < hi; ++w) {
      const int lw = w - lo;
      const int uw = dense[lu * ns + lw];
      const int wv = dense[lw * ns + lv];
      for (int k = 0; k < d; ++k) {
        double val = acc[static_cast<std::size_t>(k)] + Cn(w, k);
        if (uw >= 0) val += E2(uw, k);
        if (wv >= 0) val += E3(wv, k);
        int& am = arg[static_cast<std::size_t>(e) * d + k];
        if (am < 0 || val > o[k]) {
          o[k] = val;
          am = w;
        }
      }
    }
  }
  Var y = push(std::move(out));
  node(y).backward = [this, a, b, c, e1, e2, e3, y, index, arg = std::move(arg)] {
    const TripletIndex& ix = *index;
    const Matrix& dY = node(y).grad;
    const int m = dY.rows, d = dY.cols;
    Matrix& dA = g(a);
    Matrix& dB = g(b);
    Matrix& dC = g(c);
    Matrix& dE1 = g(e1);
    Matrix& dE2 = g(e2);
    Matrix& dE3 = g(e3);
    for (int e = 0; e < m; ++e) {
      const int u = ix.src[static_cast<std::size_t>(e)];
      const int v = ix.dst[static_cast<std::size_t>(e)];
      const int s = ix.edge_segment[static_cast<std::size_t>(e)];
      const int lo = ix.node_offsets[static_cast<std::size_t>(s)];
      const int ns = ix.node_offsets[static_cast<std::size_t>(s) + 1] - lo;
      const int* dense = ix.dense_ids.data() + ix.dense_offsets[static_cast<std::size_t>(s)];
      for (int k = 0; k < d; ++k) {
        const int w = arg[static_cast<std::size_t>(e) * d + k];
        if (w < 0) continue;
        const double gk = dY(e, k);
        dA(u, k) += gk;
        dB(v, k) += gk;
        dC(w, k) += gk;
        dE1(e, k) += gk;
        const int uw = dense[(u - lo) * ns + (w - lo)];
        const int wv = dense[(w - lo) * ns + (v - lo)];
        if (uw >= 0) dE2(uw, k) += gk;
        if (wv >= 0) dE3(wv, k) += gk;
      }
    }
  };
  return y;
}

Var Tape::sum(Var a) {
  Matrix C(1, 1);
  for (double x : value(a).data) C.data[0] += x;
  Var c = push(std::move(C));
  node(c).backward = [this, a, c] {
    const double gc = node(c).grad.data[0];
    for (double& x : g(a).data) x += gc;
  };
  return c;
}

Var Tape::combine(std::vector<Var> xs, std::vector<double> weights) {
  require(xs.size() == weights.size(), "combine: size mismatch");
  Matrix C(1, 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(value(xs[i]).size() == 1, "combine: expects scalars");
    C.data[0] += weights[i] * value(xs[i]).data[0];
  }
  Var c = push(std::move(C));
  node(c).backward = [this, c, xs = std::move(xs), w = std::move(weights)] {
    const double gc = node(c).grad.data[0];
    for (std::size_t i = 0; i < xs.size(); ++i) g(xs[i]).data[0] += w[i] * gc;
  };
  return c;
}

Var Tape::kl_div(Var logp, std::vector<double> target, double scale) {
  const Matrix& L = value(logp);
  require(L.cols == 1 && static_cast<int>(target.size()) == L.rows, "kl_div: shape mismatch");
  Matrix C(1, 1);
  for (int i = 0; i < L.rows; ++i) {
    const double q = target[static_cast<std::size_t>(i)];
    if (q > 0.0) C.data[0] += q * (std::log(q) - L(i, 0));
  }
  C.data[0] *= scale;
  Var c = push(std::move(C));
  node(c).backward = [this, logp, c, q = std::move(target), scale] {
    const double gc = node(c).grad.data[0];
    Matrix& dL = g(logp);
    for (int i = 0; i < dL.rows; ++i)
      if (q[static_cast<std::size_t>(i)] > 0.0) dL(i, 0) -= gc * scale * q[static_cast<std::size_t>(i)];
  };
  return c;
}

Var Tape::nll(Var logp, std::vector<int> rows, double scale) {
  const Matrix& L = value(logp);
  Matrix C(1, 1);
  for (int r : rows) {
    require(r >= 0 && r < L.rows, "nll: row out of range");
    C.data[0] -= L(r, 0);
  }
  C.data[0] *= scale;
  Var c = push(std::move(C));
  node(c).backward = [this, logp, c, rows = std::move(rows), scale] {
    const double gc = node(c).grad.data[0];
    Matrix& dL = g(logp);
    for (int r : rows) dL(r, 0) -= gc * scale;
  };
  return c;
}

Var Tape::ppo_clip(Var logp, std::vector<int> rows, std::vector<double> old_logp,
                   std::vector<double> advantages, double eps) {
  const Matrix& L = value(logp);
  const std::size_t n = rows.size();
  require(old_logp.size() == n && advantages.size() == n && n > 0, "ppo_clip: size mismatch");
  std::vector<double> coef(n, 0.0);
  Matrix C(1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::exp(L(rows[i], 0) - old_logp[i]);
    const double adv = advantages[i];
    const double unclipped = r * adv;
    const double clipped = std::clamp(r, 1.0 - eps, 1.0 + eps) * adv;
    C.data[0] -= std::min(unclipped, clipped);
    if (unclipped <= clipped) coef[i] = unclipped;
  }
  const double inv = 1.0 / static_cast<double>(n);
  C.data[0] *= inv;
  Var c = push(std::move(C));
  node(c).backward = [this, logp, c, rows = std::move(rows), coef = std::move(coef), inv] {
    const double gc = node(c).grad.data[0];
    Matrix& dL = g(logp);
    for (std::size_t i = 0; i < rows.size(); ++i) dL(rows[i], 0) -= gc * inv * coef[i];
  };
  return c;
}

Var Tape::mse(Var v, std::vector<double> target) {
  const Matrix& V = value(v);
  require(V.cols == 1 && static_cast<int>(target.size()) == V.rows && V.rows > 0, "mse: shape mismatch");
  Matrix C(1, 1);
  for (int i = 0; i < V.rows; ++i) {
    const double diff = V(i, 0) - target[static_cast<std::size_t>(i)];
    C.data[0] += diff * diff;
  }
  C.data[0] /= V.rows;
  Var c = push(std::move(C));
  node(c).backward = [this, v, c, t = std::move(target)] {
    const double gc = node(c).grad.data[0];
    const Matrix& V = value(v);
    Matrix& dV = g(v);
    for (int i = 0; i < V.rows; ++i)
      dV(i, 0) += gc * 2.0 * (V(i, 0) - t[static_cast<std::size_t>(i)]) / V.rows;
  };
  return c;
}

}  // namespace gnarl::nn
