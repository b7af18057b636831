#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tcf/simd/kernels.hpp"

using namespace tcf::simd;

namespace {

template <typename T>
std::vector<T> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(u(rng));
  // Sprinkle exact zeros; the scalar reference skips them.
  for (std::size_t i = 0; i < n; i += 7) v[i] = 0;
  return v;
}

template <typename T>
void expect_close(const std::vector<T>& a, const std::vector<T>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::fabs(double(a[i]) - double(b[i])) <= tol * (1.0 + std::fabs(double(a[i]))));
}

template <typename T>
void compare_tables(const KernelTable<T>& ref, const KernelTable<T>& alt, double tol) {
  std::mt19937_64 rng(7);
  const std::size_t dims[] = {1, 2, 3, 4, 5, 8, 13, 17, 33};
  for (std::size_t m : dims)
    for (std::size_t k : dims)
      for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{9},
                            std::size_t{16}, std::size_t{37}}) {
        auto a = random_vec<T>(m * k, rng);
        auto b = random_vec<T>(k * n, rng);
        auto c0 = random_vec<T>(m * n, rng);
        auto c1 = c0;
        ref.gemm_nn(a.data(), b.data(), c0.data(), m, k, n, true);
        alt.gemm_nn(a.data(), b.data(), c1.data(), m, k, n, true);
        expect_close(c0, c1, tol);
        ref.gemm_nn(a.data(), b.data(), c0.data(), m, k, n, false);
        alt.gemm_nn(a.data(), b.data(), c1.data(), m, k, n, false);
        expect_close(c0, c1, tol);

        auto at = random_vec<T>(k * m, rng);  // K x M
        auto t0 = random_vec<T>(m * n, rng);
        auto t1 = t0;
        ref.gemm_tn_acc(at.data(), b.data(), t0.data(), m, k, n);
        alt.gemm_tn_acc(at.data(), b.data(), t1.data(), m, k, n);
        expect_close(t0, t1, tol);

        auto bt = random_vec<T>(n * k, rng);  // N x K
        auto n0 = random_vec<T>(m * n, rng);
        auto n1 = n0;
        ref.gemm_nt_acc(a.data(), bt.data(), n0.data(), m, k, n);
        alt.gemm_nt_acc(a.data(), bt.data(), n1.data(), m, k, n);
        expect_close(n0, n1, tol);
      }
  for (std::size_t n : {0, 1, 3, 4, 7, 8, 15, 16, 31, 100}) {
    auto x = random_vec<T>(n, rng);
    auto y = random_vec<T>(n, rng);
    CHECK(std::fabs(double(ref.dot(x.data(), y.data(), n)) -
                    double(alt.dot(x.data(), y.data(), n))) <= tol * (1.0 + n));
    auto y0 = y, y1 = y;
    ref.axpy(T(0.37), x.data(), y0.data(), n);
    alt.axpy(T(0.37), x.data(), y1.data(), n);
    expect_close(y0, y1, tol);
    std::vector<T> z0(n), z1(n);
    ref.hadamard(x.data(), y.data(), z0.data(), n);
    alt.hadamard(x.data(), y.data(), z1.data(), n);
    expect_close(z0, z1, 0.0);
  }
}

}  // namespace

TEST_CASE("scalar gemm matches hand arithmetic") {
  const auto* k = kernels_f64(Isa::Scalar);
  REQUIRE(k != nullptr);
  double a[] = {1, 2};
  double b[] = {3, 4};
  double c[] = {0};
  k->gemm_nn(a, b, c, 1, 2, 1, false);
  CHECK(c[0] == 11.0);
  double m[] = {1, 2, 3, 4};  // 2x2
  double id[] = {1, 0, 0, 1};
  double out[4] = {};
  k->gemm_nt_acc(m, id, out, 2, 2, 2);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);
  CHECK(out[2] == 3.0);
  CHECK(out[3] == 4.0);
  double tn[4] = {};
  k->gemm_tn_acc(m, id, tn, 2, 2, 2);  // m^T
  CHECK(tn[1] == 3.0);
  CHECK(tn[2] == 2.0);
}

TEST_CASE("vector variants agree with the scalar reference") {
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    const auto* alt64 = kernels_f64(isa);
    const auto* alt32 = kernels_f32(isa);
    if (!alt64) continue;
    INFO("isa: " << isa_name(isa));
    compare_tables(*kernels_f64(Isa::Scalar), *alt64, 1e-12);
    REQUIRE(alt32 != nullptr);
    compare_tables(*kernels_f32(Isa::Scalar), *alt32, 1e-4);
  }
}

TEST_CASE("dispatch can be pinned to scalar and restored") {
  const Isa best = detect_isa();
  CHECK(set_isa(Isa::Scalar));
  CHECK(active_isa() == Isa::Scalar);
  double x[] = {1, 2, 3}, y[] = {4, 5, 6};
  CHECK(dot(x, y, 3) == 32.0);
  set_isa(best);
  CHECK(active_isa() == best);
  CHECK(dot(x, y, 3) == 32.0);
}
