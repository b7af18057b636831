// NEON kernels for aarch64.  Only the float and double paths that matter for
// the tape (gemm rows, dot) are vectorized; the rest reuse the reference.

#include "tcf/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#define TCF_HAVE_NEON_BUILD 1
#include <arm_neon.h>
#else
#define TCF_HAVE_NEON_BUILD 0
#endif

#include <cstring>

namespace tcf::simd::detail {

#if TCF_HAVE_NEON_BUILD
namespace {

inline void row_fma(double av, const double* brow, double* crow,
                    std::size_t n) {
  const float64x2_t a2 = vdupq_n_f64(av);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2)
    vst1q_f64(crow + j, vfmaq_f64(vld1q_f64(crow + j), a2, vld1q_f64(brow + j)));
  for (; j < n; ++j) crow[j] += av * brow[j];
}

inline void row_fma(float av, const float* brow, float* crow, std::size_t n) {
  const float32x4_t a4 = vdupq_n_f32(av);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4)
    vst1q_f32(crow + j, vfmaq_f32(vld1q_f32(crow + j), a4, vld1q_f32(brow + j)));
  for (; j < n; ++j) crow[j] += av * brow[j];
}

inline double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t s = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) s = vfmaq_f64(s, vld1q_f64(x + i), vld1q_f64(y + i));
  double r = vaddvq_f64(s);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

inline float dot_neon(const float* x, const float* y, std::size_t n) {
  float32x4_t s = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) s = vfmaq_f32(s, vld1q_f32(x + i), vld1q_f32(y + i));
  float r = vaddvq_f32(s);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

template <typename T>
void gemm_nn_neon(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                  std::size_t n, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(T) * m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      if (av != T(0)) row_fma(av, b + p * n, c + i * n, n);
    }
}

template <typename T>
void gemm_tn_acc_neon(const T* a, const T* b, T* c, std::size_t m,
                      std::size_t k, std::size_t n) {
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t i = 0; i < m; ++i) {
      const T av = a[p * m + i];
      if (av != T(0)) row_fma(av, b + p * n, c + i * n, n);
    }
}

template <typename T>
void gemm_nt_acc_neon(const T* a, const T* b, T* c, std::size_t m,
                      std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c[i * n + j] += dot_neon(a + i * k, b + j * k, k);
}

template <typename T>
T dot_entry(const T* x, const T* y, std::size_t n) {
  return dot_neon(x, y, n);
}

template <typename T>
void axpy_neon(T alpha, const T* x, T* y, std::size_t n) {
  row_fma(alpha, x, y, n);
}

template <typename T>
KernelTable<T> make_table(const KernelTable<T>* ref) {
  return {&gemm_nn_neon<T>, &gemm_tn_acc_neon<T>, &gemm_nt_acc_neon<T>,
          &dot_entry<T>,    &axpy_neon<T>,        ref->hadamard};
}

}  // namespace

const KernelTable<double>* neon_f64() {
  static const KernelTable<double> table = make_table(scalar_f64());
  return &table;
}
const KernelTable<float>* neon_f32() {
  static const KernelTable<float> table = make_table(scalar_f32());
  return &table;
}

#else

const KernelTable<double>* neon_f64() { return nullptr; }
const KernelTable<float>* neon_f32() { return nullptr; }

#endif

}  // namespace tcf::simd::detail
