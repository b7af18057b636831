// Scalar reference kernels.  The loop orders here define the reference
// summation order the vector variants are tested against.

#include "tcf/simd/kernels.hpp"

#include <cstring>

namespace tcf::simd::detail {
namespace {

template <typename T>
void gemm_nn_ref(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                 std::size_t n, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(T) * m * n);
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      if (av == T(0)) continue;
      const T* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
void gemm_tn_acc_ref(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                     std::size_t n) {
  for (std::size_t p = 0; p < k; ++p) {
    const T* arow = a + p * m;
    const T* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const T av = arow[i];
      if (av == T(0)) continue;
      T* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
T dot_ref(const T* x, const T* y, std::size_t n) {
  T s = 0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

template <typename T>
void gemm_nt_acc_ref(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                     std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c[i * n + j] += dot_ref(a + i * k, b + j * k, k);
}

template <typename T>
void axpy_ref(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void hadamard_ref(const T* x, const T* y, T* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

template <typename T>
constexpr KernelTable<T> make_table() {
  return {&gemm_nn_ref<T>, &gemm_tn_acc_ref<T>, &gemm_nt_acc_ref<T>,
          &dot_ref<T>,     &axpy_ref<T>,        &hadamard_ref<T>};
}

constexpr KernelTable<double> kScalarF64 = make_table<double>();
constexpr KernelTable<float> kScalarF32 = make_table<float>();

}  // namespace

const KernelTable<double>* scalar_f64() { return &kScalarF64; }
const KernelTable<float>* scalar_f32() { return &kScalarF32; }

}  // namespace tcf::simd::detail
