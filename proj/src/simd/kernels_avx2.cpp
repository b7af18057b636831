// AVX2/FMA kernels.  Compiled with per-function target attributes so the
// rest of the build stays baseline x86-64; only reached after the runtime
// CPU check in dispatch.cpp.

#include "tcf/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define TCF_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#else
#define TCF_HAVE_AVX2_BUILD 0
#endif

#include <cstring>

namespace tcf::simd::detail {

#if TCF_HAVE_AVX2_BUILD
namespace {

#define TCF_AVX2 __attribute__((target("avx2,fma")))

TCF_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

TCF_AVX2 inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 sh = _mm_movehdup_ps(lo);
  __m128 s = _mm_add_ps(lo, sh);
  sh = _mm_movehl_ps(sh, s);
  return _mm_cvtss_f32(_mm_add_ss(s, sh));
}

// row += av * brow, length n
TCF_AVX2 inline void row_fma(double av, const double* brow, double* crow,
                             std::size_t n) {
  const __m256d a4 = _mm256_set1_pd(av);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d c4 = _mm256_loadu_pd(crow + j);
    c4 = _mm256_fmadd_pd(a4, _mm256_loadu_pd(brow + j), c4);
    _mm256_storeu_pd(crow + j, c4);
  }
  for (; j < n; ++j) crow[j] += av * brow[j];
}

TCF_AVX2 inline void row_fma(float av, const float* brow, float* crow,
                             std::size_t n) {
  const __m256 a8 = _mm256_set1_ps(av);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256 c8 = _mm256_loadu_ps(crow + j);
    c8 = _mm256_fmadd_ps(a8, _mm256_loadu_ps(brow + j), c8);
    _mm256_storeu_ps(crow + j, c8);
  }
  for (; j < n; ++j) crow[j] += av * brow[j];
}

TCF_AVX2 double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                         _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

TCF_AVX2 float dot_avx2(const float* x, const float* y, std::size_t n) {
  __m256 s0 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    s0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), s0);
  float s = hsum(s0);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

template <typename T>
TCF_AVX2 void gemm_nn_avx2(const T* a, const T* b, T* c, std::size_t m,
                           std::size_t k, std::size_t n, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(T) * m * n);
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      if (av == T(0)) continue;
      row_fma(av, b + p * n, crow, n);
    }
  }
}

template <typename T>
TCF_AVX2 void gemm_tn_acc_avx2(const T* a, const T* b, T* c, std::size_t m,
                               std::size_t k, std::size_t n) {
  for (std::size_t p = 0; p < k; ++p) {
    const T* arow = a + p * m;
    const T* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const T av = arow[i];
      if (av == T(0)) continue;
      row_fma(av, brow, c + i * n, n);
    }
  }
}

template <typename T>
TCF_AVX2 void gemm_nt_acc_avx2(const T* a, const T* b, T* c, std::size_t m,
                               std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c[i * n + j] += dot_avx2(a + i * k, b + j * k, k);
}

template <typename T>
TCF_AVX2 void axpy_avx2(T alpha, const T* x, T* y, std::size_t n) {
  row_fma(alpha, x, y, n);
}

TCF_AVX2 void hadamard_avx2(const double* x, const double* y, double* z,
                            std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i),
                                          _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

TCF_AVX2 void hadamard_avx2(const float* x, const float* y, float* z,
                            std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(z + i, _mm256_mul_ps(_mm256_loadu_ps(x + i),
                                          _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

template <typename T>
T dot_entry(const T* x, const T* y, std::size_t n) {
  return dot_avx2(x, y, n);
}
template <typename T>
void hadamard_entry(const T* x, const T* y, T* z, std::size_t n) {
  hadamard_avx2(x, y, z, n);
}

template <typename T>
KernelTable<T> make_table() {
  return {&gemm_nn_avx2<T>, &gemm_tn_acc_avx2<T>, &gemm_nt_acc_avx2<T>,
          &dot_entry<T>,    &axpy_avx2<T>,        &hadamard_entry<T>};
}

const KernelTable<double> kAvx2F64 = make_table<double>();
const KernelTable<float> kAvx2F32 = make_table<float>();

#undef TCF_AVX2

}  // namespace

const KernelTable<double>* avx2_f64() { return &kAvx2F64; }
const KernelTable<float>* avx2_f32() { return &kAvx2F32; }

#else

const KernelTable<double>* avx2_f64() { return nullptr; }
const KernelTable<float>* avx2_f32() { return nullptr; }

#endif

}  // namespace tcf::simd::detail
