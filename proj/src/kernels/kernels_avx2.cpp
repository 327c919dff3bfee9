#include "gnarl/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

#include <cmath>

namespace gnarl::kernels {
namespace {

// Every output element is produced as acc = fma(a, b, acc) over p in order,
// starting from zero, then added to C. Vector and scalar tails perform the
// same rounding sequence, so results never depend on which block a row hits.

inline void nn_rows4(int n, int k, const double* a, int lda, const double* b, int ldb, double* c,
                     int ldc) {
  const double* a0 = a;
  const double* a1 = a + lda;
  const double* a2 = a + 2L * lda;
  const double* a3 = a + 3L * lda;
  int j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
    __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
    __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
    __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
    for (int p = 0; p < k; ++p) {
      const double* brow = b + static_cast<long>(p) * ldb + j;
      const __m256d b0 = _mm256_loadu_pd(brow);
      const __m256d b1 = _mm256_loadu_pd(brow + 4);
      __m256d x = _mm256_broadcast_sd(a0 + p);
      c00 = _mm256_fmadd_pd(x, b0, c00);
      c01 = _mm256_fmadd_pd(x, b1, c01);
      x = _mm256_broadcast_sd(a1 + p);
      c10 = _mm256_fmadd_pd(x, b0, c10);
      c11 = _mm256_fmadd_pd(x, b1, c11);
      x = _mm256_broadcast_sd(a2 + p);
      c20 = _mm256_fmadd_pd(x, b0, c20);
      c21 = _mm256_fmadd_pd(x, b1, c21);
      x = _mm256_broadcast_sd(a3 + p);
      c30 = _mm256_fmadd_pd(x, b0, c30);
      c31 = _mm256_fmadd_pd(x, b1, c31);
    }
    double* r0 = c + j;
    double* r1 = c + ldc + j;
    double* r2 = c + 2L * ldc + j;
    double* r3 = c + 3L * ldc + j;
    _mm256_storeu_pd(r0, _mm256_add_pd(_mm256_loadu_pd(r0), c00));
    _mm256_storeu_pd(r0 + 4, _mm256_add_pd(_mm256_loadu_pd(r0 + 4), c01));
    _mm256_storeu_pd(r1, _mm256_add_pd(_mm256_loadu_pd(r1), c10));
    _mm256_storeu_pd(r1 + 4, _mm256_add_pd(_mm256_loadu_pd(r1 + 4), c11));
    _mm256_storeu_pd(r2, _mm256_add_pd(_mm256_loadu_pd(r2), c20));
    _mm256_storeu_pd(r2 + 4, _mm256_add_pd(_mm256_loadu_pd(r2 + 4), c21));
    _mm256_storeu_pd(r3, _mm256_add_pd(_mm256_loadu_pd(r3), c30));
    _mm256_storeu_pd(r3 + 4, _mm256_add_pd(_mm256_loadu_pd(r3 + 4), c31));
  }
  for (; j < n; ++j) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int p = 0; p < k; ++p) {
      const double bv = b[static_cast<long>(p) * ldb + j];
      s0 = std::fma(a0[p], bv, s0);
      s1 = std::fma(a1[p], bv, s1);
      s2 = std::fma(a2[p], bv, s2);
      s3 = std::fma(a3[p], bv, s3);
    }
    c[j] += s0;
    c[ldc + j] += s1;
    c[2L * ldc + j] += s2;
    c[3L * ldc + j] += s3;
  }
}

inline void nn_row1(int n, int k, const double* a, const double* b, int ldb, double* c) {
  int j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256d c0 = _mm256_setzero_pd(), c1 = _mm256_setzero_pd();
    for (int p = 0; p < k; ++p) {
      const double* brow = b + static_cast<long>(p) * ldb + j;
      const __m256d x = _mm256_broadcast_sd(a + p);
      c0 = _mm256_fmadd_pd(x, _mm256_loadu_pd(brow), c0);
      c1 = _mm256_fmadd_pd(x, _mm256_loadu_pd(brow + 4), c1);
    }
    _mm256_storeu_pd(c + j, _mm256_add_pd(_mm256_loadu_pd(c + j), c0));
    _mm256_storeu_pd(c + j + 4, _mm256_add_pd(_mm256_loadu_pd(c + j + 4), c1));
  }
  for (; j < n; ++j) {
    double s = 0.0;
    for (int p = 0; p < k; ++p) s = std::fma(a[p], b[static_cast<long>(p) * ldb + j], s);
    c[j] += s;
  }
}

void gemm_nn_avx2(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                  double* c, int ldc) {
  int i = 0;
  for (; i + 4 <= m; i += 4)
    nn_rows4(n, k, a + static_cast<long>(i) * lda, lda, b, ldb, c + static_cast<long>(i) * ldc, ldc);
  for (; i < m; ++i)
    nn_row1(n, k, a + static_cast<long>(i) * lda, b, ldb, c + static_cast<long>(i) * ldc);
}

void gemm_tn_avx2(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                  double* c, int ldc) {
  // C[i, :] += sum_p A[p, i] * B[p, :]
  int i = 0;
  for (; i + 4 <= m; i += 4) {
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
      __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
      __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
      __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
      for (int p = 0; p < k; ++p) {
        const double* arow = a + static_cast<long>(p) * lda + i;
        const double* brow = b + static_cast<long>(p) * ldb + j;
        const __m256d b0 = _mm256_loadu_pd(brow);
        const __m256d b1 = _mm256_loadu_pd(brow + 4);
        __m256d x = _mm256_broadcast_sd(arow);
        c00 = _mm256_fmadd_pd(x, b0, c00);
        c01 = _mm256_fmadd_pd(x, b1, c01);
        x = _mm256_broadcast_sd(arow + 1);
        c10 = _mm256_fmadd_pd(x, b0, c10);
        c11 = _mm256_fmadd_pd(x, b1, c11);
        x = _mm256_broadcast_sd(arow + 2);
        c20 = _mm256_fmadd_pd(x, b0, c20);
        c21 = _mm256_fmadd_pd(x, b1, c21);
        x = _mm256_broadcast_sd(arow + 3);
        c30 = _mm256_fmadd_pd(x, b0, c30);
        c31 = _mm256_fmadd_pd(x, b1, c31);
      }
      double* r0 = c + static_cast<long>(i) * ldc + j;
      _mm256_storeu_pd(r0, _mm256_add_pd(_mm256_loadu_pd(r0), c00));
      _mm256_storeu_pd(r0 + 4, _mm256_add_pd(_mm256_loadu_pd(r0 + 4), c01));
      r0 += ldc;
      _mm256_storeu_pd(r0, _mm256_add_pd(_mm256_loadu_pd(r0), c10));
      _mm256_storeu_pd(r0 + 4, _mm256_add_pd(_mm256_loadu_pd(r0 + 4), c11));
      r0 += ldc;
      _mm256_storeu_pd(r0, _mm256_add_pd(_mm256_loadu_pd(r0), c20));
      _mm256_storeu_pd(r0 + 4, _mm256_add_pd(_mm256_loadu_pd(r0 + 4), c21));
      r0 += ldc;
      _mm256_storeu_pd(r0, _mm256_add_pd(_mm256_loadu_pd(r0), c30));
      _mm256_storeu_pd(r0 + 4, _mm256_add_pd(_mm256_loadu_pd(r0 + 4), c31));
    }
    for (; j < n; ++j) {
      for (int ii = i; ii < i + 4; ++ii) {
        double s = 0.0;
        for (int p = 0; p < k; ++p)
          s = std::fma(a[static_cast<long>(p) * lda + ii], b[static_cast<long>(p) * ldb + j], s);
        c[static_cast<long>(ii) * ldc + j] += s;
      }
    }
  }
  for (; i < m; ++i) {
    int j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (int p = 0; p < k; ++p)
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(a + static_cast<long>(p) * lda + i),
                              _mm256_loadu_pd(b + static_cast<long>(p) * ldb + j), acc);
      double* r = c + static_cast<long>(i) * ldc + j;
      _mm256_storeu_pd(r, _mm256_add_pd(_mm256_loadu_pd(r), acc));
    }
    for (; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p)
        s = std::fma(a[static_cast<long>(p) * lda + i], b[static_cast<long>(p) * ldb + j], s);
      c[static_cast<long>(i) * ldc + j] += s;
    }
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

inline double dot_fma(int k, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  int p = 0;
  for (; p + 4 <= k; p += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + p), _mm256_loadu_pd(y + p), acc);
  double s = hsum(acc);
  for (; p < k; ++p) s = std::fma(x[p], y[p], s);
  return s;
}

void gemm_nt_avx2(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                  double* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<long>(i) * lda;
    double* crow = c + static_cast<long>(i) * ldc;
    int j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = b + static_cast<long>(j) * ldb;
      const double* b1 = b0 + ldb;
      const double* b2 = b1 + ldb;
      const double* b3 = b2 + ldb;
      __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
      __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
      int p = 0;
      for (; p + 4 <= k; p += 4) {
        const __m256d x = _mm256_loadu_pd(arow + p);
        s0 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b0 + p), s0);
        s1 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b1 + p), s1);
        s2 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b2 + p), s2);
        s3 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b3 + p), s3);
      }
      double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
      for (; p < k; ++p) {
        r0 = std::fma(arow[p], b0[p], r0);
        r1 = std::fma(arow[p], b1[p], r1);
        r2 = std::fma(arow[p], b2[p], r2);
        r3 = std::fma(arow[p], b3[p], r3);
      }
      crow[j] += r0;
      crow[j + 1] += r1;
      crow[j + 2] += r2;
      crow[j + 3] += r3;
    }
    for (; j < n; ++j) crow[j] += dot_fma(k, arow, b + static_cast<long>(j) * ldb);
  }
}

void axpy_avx2(int n, double alpha, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

double dot_avx2(int n, const double* x, const double* y) { return dot_fma(n, x, y); }

constexpr KernelTable kAvx2{"avx2", gemm_nn_avx2, gemm_tn_avx2, gemm_nt_avx2, axpy_avx2, dot_avx2};

}  // namespace

const KernelTable* avx2_table_unchecked() { return &kAvx2; }

}  // namespace gnarl::kernels

#else

namespace gnarl::kernels {
const KernelTable* avx2_table_unchecked() { return nullptr; }
}  // namespace gnarl::kernels

#endif
