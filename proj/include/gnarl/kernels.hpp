#pragma once

#include <string_view>

// Dense double-precision kernels used by the autodiff tape.
//
// Each kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2+FMA variant compiled in its own translation unit. The active table
// is chosen once at startup from CPUID; GNARL_KERNELS=scalar|avx2 overrides.
//
// All matrices are row-major with explicit leading dimensions. Every gemm
// accumulates into C. The per-row results of gemm_nn and gemm_nt depend only
// on that row's inputs, so batching graphs by concatenation does not change
// any individual graph's forward pass.

namespace gnarl::kernels {

struct KernelTable {
  std::string_view name;
  // C[m x n] += A[m x k] * B[k x n]
  void (*gemm_nn)(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                  double* c, int ldc);
  // C[m x n] += A[k x m]^T * B[k x n]
  void (*gemm_tn)(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                  double* c, int ldc);
  // C[m x n] += A[m x k] * B[n x k]^T
  void (*gemm_nt)(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                  double* c, int ldc);
  // y += alpha * x
  void (*axpy)(int n, double alpha, const double* x, double* y);
  double (*dot)(int n, const double* x, const double* y);
};

const KernelTable& scalar_table();

/// nullptr when the variant was not built or the CPU lacks the instructions.
const KernelTable* avx2_table();

/// The table selected for this process.
const KernelTable& active();

/// Force a table by name ("scalar" or "avx2"); returns false if unavailable.
bool select(std::string_view name);

}  // namespace gnarl::kernels
