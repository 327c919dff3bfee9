#include "gnarl/kernels.hpp"

namespace gnarl::kernels {
namespace {

void gemm_nn_ref(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                 double* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<long>(i) * ldc;
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += a[static_cast<long>(i) * lda + p] * b[static_cast<long>(p) * ldb + j];
      crow[j] += acc;
    }
  }
}

void gemm_tn_ref(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                 double* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += a[static_cast<long>(p) * lda + i] * b[static_cast<long>(p) * ldb + j];
      c[static_cast<long>(i) * ldc + j] += acc;
    }
  }
}

void gemm_nt_ref(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                 double* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += a[static_cast<long>(i) * lda + p] * b[static_cast<long>(j) * ldb + p];
      c[static_cast<long>(i) * ldc + j] += acc;
    }
  }
}

void axpy_ref(int n, double alpha, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot_ref(int n, const double* x, const double* y) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

constexpr KernelTable kScalar{"scalar", gemm_nn_ref, gemm_tn_ref, gemm_nt_ref, axpy_ref, dot_ref};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace gnarl::kernels
