#include <atomic>

#include "tcf/simd/kernels.hpp"

namespace tcf::simd {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable<double>* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return detail::scalar_f64();
    case Isa::Avx2:
      return cpu_has_avx2() ? detail::avx2_f64() : nullptr;
    case Isa::Neon:
      return detail::neon_f64();
  }
  return nullptr;
}

struct Active {
  std::atomic<const KernelTable<double>*> table;
  std::atomic<Isa> isa;
  Active() {
    const Isa best = detect_isa();
    table.store(table_for(best));
    isa.store(best);
  }
};

Active& active() {
  static Active a;
  return a;
}

inline const KernelTable<double>& k() {
  return *active().table.load(std::memory_order_relaxed);
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

Isa detect_isa() {
  if (detail::avx2_f64() != nullptr && cpu_has_avx2()) return Isa::Avx2;
  if (detail::neon_f64() != nullptr) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() { return active().isa.load(); }

bool set_isa(Isa isa) {
  const KernelTable<double>* t = table_for(isa);
  const bool ok = t != nullptr;
  if (!ok) {
    t = detail::scalar_f64();
    isa = Isa::Scalar;
  }
  active().table.store(t);
  active().isa.store(isa);
  return ok;
}

const KernelTable<double>* kernels_f64(Isa isa) { return table_for(isa); }

const KernelTable<float>* kernels_f32(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return detail::scalar_f32();
    case Isa::Avx2:
      return cpu_has_avx2() ? detail::avx2_f32() : nullptr;
    case Isa::Neon:
      return detail::neon_f32();
  }
  return nullptr;
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t kk, std::size_t n, bool accumulate) {
  k().gemm_nn(a, b, c, m, kk, n, accumulate);
}
void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t kk, std::size_t n) {
  k().gemm_tn_acc(a, b, c, m, kk, n);
}
void gemm_nt_acc(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t kk, std::size_t n) {
  k().gemm_nt_acc(a, b, c, m, kk, n);
}
double dot(const double* x, const double* y, std::size_t n) {
  return k().dot(x, y, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  k().axpy(alpha, x, y, n);
}
void hadamard(const double* x, const double* y, double* z, std::size_t n) {
  k().hadamard(x, y, z, n);
}

}  // namespace tcf::simd
