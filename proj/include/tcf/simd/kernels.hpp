#pragma once
// Dense linear-algebra kernels used by the autodiff tape.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2/FMA (x86-64) or NEON (aarch64) variant.  The active
// variant is chosen once at startup from the CPU feature bits and can be
// pinned to the scalar reference (deterministic mode) so results are
// bit-reproducible across machines.
//
// All matrices are dense row-major.

#include <cstddef>
#include <string_view>

namespace tcf::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

// Best variant the running CPU supports.
Isa detect_isa();

// Variant currently used by the dispatching entry points below.
Isa active_isa();

// Pin the dispatching entry points to `isa`.  Falls back to Scalar (and
// returns false) when the CPU or build does not support the request.
bool set_isa(Isa isa);

// Kernel table for one instruction set.  Exposed so tests can compare
// variants against the scalar reference directly.
template <typename T>
struct KernelTable {
  // C(MxN) (+)= A(MxK) * B(KxN)
  void (*gemm_nn)(const T* a, const T* b, T* c, std::size_t m, std::size_t k,
                  std::size_t n, bool accumulate);
  // C(MxN) += A(KxM)^T * B(KxN)
  void (*gemm_tn_acc)(const T* a, const T* b, T* c, std::size_t m,
                      std::size_t k, std::size_t n);
  // C(MxN) += A(MxK) * B(NxK)^T
  void (*gemm_nt_acc)(const T* a, const T* b, T* c, std::size_t m,
                      std::size_t k, std::size_t n);
  T (*dot)(const T* x, const T* y, std::size_t n);
  // y += alpha * x
  void (*axpy)(T alpha, const T* x, T* y, std::size_t n);
  // z = x * y elementwise
  void (*hadamard)(const T* x, const T* y, T* z, std::size_t n);
};

// Returns nullptr when `isa` is not compiled in or not supported by the CPU.
const KernelTable<double>* kernels_f64(Isa isa);
const KernelTable<float>* kernels_f32(Isa isa);

// Dispatching entry points (double precision, the model's working type).
void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate = false);
void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t k, std::size_t n);
void gemm_nt_acc(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t k, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void hadamard(const double* x, const double* y, double* z, std::size_t n);

namespace detail {
const KernelTable<double>* scalar_f64();
const KernelTable<float>* scalar_f32();
const KernelTable<double>* avx2_f64();  // nullptr when not built
const KernelTable<float>* avx2_f32();
const KernelTable<double>* neon_f64();
const KernelTable<float>* neon_f32();
}  // namespace detail

}  // namespace tcf::simd
