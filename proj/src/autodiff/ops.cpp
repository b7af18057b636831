#include <algorithm>
#include <cmath>

#include "tcf/autodiff/tape.hpp"
#include "tcf/simd/kernels.hpp"

namespace tcf::ad {
namespace {

enum class Bcast { Same, Row, Col, Scalar };

Bcast broadcast_kind(const char* op, const Shape& a, const Shape& b) {
  if (a == b) return Bcast::Same;
  if (b.rows == 1 && b.cols == 1) return Bcast::Scalar;
  if (b.rows == 1 && b.cols == a.cols) return Bcast::Row;
  if (b.cols == 1 && b.rows == a.rows) return Bcast::Col;
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.str() +
                   " and " + b.str());
}

inline std::size_t b_index(Bcast k, std::size_t r, std::size_t c,
                           std::size_t cols) {
  switch (k) {
    case Bcast::Same:
      return r * cols + c;
    case Bcast::Row:
      return c;
    case Bcast::Col:
      return r;
    case Bcast::Scalar:
      return 0;
  }
  return 0;
}

Tape* same_tape(const char* op, Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape)
    throw std::invalid_argument(std::string(op) + ": operands on different tapes");
  return a.tape;
}

// Elementwise binary op with broadcasting of b.  `f(a,b)` gives the value,
// `da(a,b)` / `db(a,b)` the partial derivatives.
template <typename F, typename DA, typename DB>
Var binary(const char* op, Var a, Var b, F f, DA da, DB db) {
  Tape* t = same_tape(op, a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const Bcast kind = broadcast_kind(op, av.shape(), bv.shape());
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out(r, c) = f(av(r, c), bv[b_index(kind, r, c, cols)]);
  return t->record(op, std::move(out), {a.id, b.id},
                   [kind, rows, cols, da, db](Tape& tp, int self) {
                     const int ia = tp.input(self, 0), ib = tp.input(self, 1);
                     const Tensor& g = tp.grad(self);
                     const Tensor& x = tp.value(ia);
                     const Tensor& y = tp.value(ib);
                     if (tp.requires_grad(ia)) {
                       Tensor& ga = tp.grad(ia);
                       for (std::size_t r = 0; r < rows; ++r)
                         for (std::size_t c = 0; c < cols; ++c)
                           ga(r, c) += g(r, c) * da(x(r, c), y[b_index(kind, r, c, cols)]);
                     }
                     if (tp.requires_grad(ib)) {
                       Tensor& gb = tp.grad(ib);
                       for (std::size_t r = 0; r < rows; ++r)
                         for (std::size_t c = 0; c < cols; ++c) {
                           const std::size_t j = b_index(kind, r, c, cols);
                           gb[j] += g(r, c) * db(x(r, c), y[j]);
                         }
                     }
                   });
}

template <typename F, typename DF>
Var unary(const char* op, Var a, F f, DF df) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  return a.tape->record(op, std::move(out), {a.id}, [df](Tape& tp, int self) {
    const int ia = tp.input(self, 0);
    const Tensor& g = tp.grad(self);
    const Tensor& x = tp.value(ia);
    const Tensor& y = tp.value(self);
    Tensor& ga = tp.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * df(x[i], y[i]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape* t = same_tape("matmul", a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows())
    throw ShapeError("matmul: incompatible shapes " + av.shape().str() + " and " +
                     bv.shape().str());
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  Tensor out(m, n);
  simd::gemm_nn(av.data(), bv.data(), out.data(), m, k, n);
  return t->record("matmul", std::move(out), {a.id, b.id},
                   [m, k, n](Tape& tp, int self) {
                     const int ia = tp.input(self, 0), ib = tp.input(self, 1);
                     const Tensor& g = tp.grad(self);
                     if (tp.requires_grad(ia))
                       simd::gemm_nt_acc(g.data(), tp.value(ib).data(),
                                         tp.grad(ia).data(), m, n, k);
                     if (tp.requires_grad(ib))
                       simd::gemm_tn_acc(tp.value(ia).data(), g.data(),
                                         tp.grad(ib).data(), k, m, n);
                   });
}

Var add(Var a, Var b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Var sub(Var a, Var b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Var mul(Var a, Var b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Var div(Var a, Var b) {
  return binary(
      "div", a, b,
      [](double x, double y) { return x / std::max(y, kNumericFloor); },
      [](double, double y) { return 1.0 / std::max(y, kNumericFloor); },
      [](double x, double y) {
        return y > kNumericFloor ? -x / (y * y) : 0.0;
      });
}

Var scale(Var a, double c) {
  return unary(
      "scale", a, [c](double x) { return c * x; },
      [c](double, double) { return c; });
}

Var add_scalar(Var a, double c) {
  return unary(
      "add_scalar", a, [c](double x) { return x + c; },
      [](double, double) { return 1.0; });
}

Var sigmoid(Var a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var log(Var a) {
  return unary(
      "log", a, [](double x) { return std::log(std::max(x, kNumericFloor)); },
      [](double x, double) { return x > kNumericFloor ? 1.0 / x : 0.0; });
}

Var abs(Var a) {
  return unary(
      "abs", a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
}

Var square(Var a) {
  return unary(
      "square", a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Var clamp_min(Var a, double floor) {
  return unary(
      "clamp_min", a, [floor](double x) { return std::max(x, floor); },
      [floor](double x, double) { return x > floor ? 1.0 : 0.0; });
}

Var softmax(Var a, std::size_t group) {
  const Tensor& av = a.value();
  const std::size_t rows = av.rows(), cols = av.cols();
  if (group == 0) group = cols;
  if (group == 0 || cols % group != 0)
    throw ShapeError("softmax: group width " + std::to_string(group) +
                     " does not divide " + av.shape().str());
  Tensor out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t g0 = 0; g0 < cols; g0 += group) {
      double mx = av(r, g0);
      for (std::size_t c = g0; c < g0 + group; ++c) mx = std::max(mx, av(r, c));
      double z = 0;
      for (std::size_t c = g0; c < g0 + group; ++c) z += out(r, c) = std::exp(av(r, c) - mx);
      for (std::size_t c = g0; c < g0 + group; ++c) out(r, c) /= z;
    }
  return a.tape->record("softmax", std::move(out), {a.id},
                        [rows, cols, group](Tape& tp, int self) {
                          const Tensor& g = tp.grad(self);
                          const Tensor& s = tp.value(self);
                          Tensor& ga = tp.grad(tp.input(self, 0));
                          for (std::size_t r = 0; r < rows; ++r)
                            for (std::size_t g0 = 0; g0 < cols; g0 += group) {
                              double inner = 0;
                              for (std::size_t c = g0; c < g0 + group; ++c)
                                inner += g(r, c) * s(r, c);
                              for (std::size_t c = g0; c < g0 + group; ++c)
                                ga(r, c) += s(r, c) * (g(r, c) - inner);
                            }
                        });
}

Var sum(Var a) {
  double s = 0;
  for (double v : a.value().values()) s += v;
  return a.tape->record("sum", Tensor::scalar(s), {a.id}, [](Tape& tp, int self) {
    const double g = tp.grad(self).item();
    Tensor& ga = tp.grad(tp.input(self, 0));
    for (auto& v : ga.values()) v += g;
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ShapeError("mean: empty tensor");
  return scale(sum(a), 1.0 / n);
}

Var sum_cols(Var a) {
  const Tensor& av = a.value();
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out(rows, 1);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < cols; ++c) s += av(r, c);
    out(r, 0) = s;
  }
  return a.tape->record("sum_cols", std::move(out), {a.id},
                        [rows, cols](Tape& tp, int self) {
                          const Tensor& g = tp.grad(self);
                          Tensor& ga = tp.grad(tp.input(self, 0));
                          for (std::size_t r = 0; r < rows; ++r)
                            for (std::size_t c = 0; c < cols; ++c) ga(r, c) += g(r, 0);
                        });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  Tape* t = parts[0].tape;
  const std::size_t rows = parts[0].value().rows();
  std::size_t cols = 0;
  std::vector<int> ids;
  std::vector<std::size_t> widths;
  for (const Var& p : parts) {
    if (p.tape != t) throw std::invalid_argument("concat_cols: operands on different tapes");
    if (p.value().rows() != rows)
      throw ShapeError("concat_cols: row mismatch " + parts[0].shape().str() +
                       " vs " + p.shape().str());
    ids.push_back(p.id);
    widths.push_back(p.value().cols());
    cols += p.value().cols();
  }
  Tensor out(rows, cols);
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(v.data() + r * v.cols(), v.cols(), out.data() + r * cols + off);
    off += v.cols();
  }
  return t->record("concat_cols", std::move(out), std::move(ids),
                   [rows, cols, widths](Tape& tp, int self) {
                     const Tensor& g = tp.grad(self);
                     std::size_t o = 0;
                     for (std::size_t i = 0; i < widths.size(); ++i) {
                       const int in = tp.input(self, i);
                       if (tp.requires_grad(in)) {
                         Tensor& gi = tp.grad(in);
                         for (std::size_t r = 0; r < rows; ++r)
                           simd::axpy(1.0, g.data() + r * cols + o,
                                      gi.data() + r * widths[i], widths[i]);
                       }
                       o += widths[i];
                     }
                   });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  Tape* t = parts[0].tape;
  const std::size_t cols = parts[0].value().cols();
  std::size_t rows = 0;
  std::vector<int> ids;
  std::vector<std::size_t> heights;
  for (const Var& p : parts) {
    if (p.tape != t) throw std::invalid_argument("concat_rows: operands on different tapes");
    if (p.value().cols() != cols)
      throw ShapeError("concat_rows: column mismatch " + parts[0].shape().str() +
                       " vs " + p.shape().str());
    ids.push_back(p.id);
    heights.push_back(p.value().rows());
    rows += p.value().rows();
  }
  Tensor out(rows, cols);
  std::size_t off = 0;
  for (const Var& p : parts) {
    std::copy(p.value().vec().begin(), p.value().vec().end(), out.data() + off);
    off += p.value().size();
  }
  return t->record("concat_rows", std::move(out), std::move(ids),
                   [cols, heights](Tape& tp, int self) {
                     const Tensor& g = tp.grad(self);
                     std::size_t o = 0;
                     for (std::size_t i = 0; i < heights.size(); ++i) {
                       const int in = tp.input(self, i);
                       const std::size_t n = heights[i] * cols;
                       if (tp.requires_grad(in))
                         simd::axpy(1.0, g.data() + o, tp.grad(in).data(), n);
                       o += n;
                     }
                   });
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  if (begin > end || end > av.cols())
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") outside " + av.shape().str());
  const std::size_t rows = av.rows(), cols = av.cols(), w = end - begin;
  Tensor out(rows, w);
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(av.data() + r * cols + begin, w, out.data() + r * w);
  return a.tape->record("slice_cols", std::move(out), {a.id},
                        [rows, cols, begin, w](Tape& tp, int self) {
                          const Tensor& g = tp.grad(self);
                          Tensor& ga = tp.grad(tp.input(self, 0));
                          for (std::size_t r = 0; r < rows; ++r)
                            simd::axpy(1.0, g.data() + r * w,
                                       ga.data() + r * cols + begin, w);
                        });
}

Var gradient_reversal(Var a, double lambda) {
  if (lambda < 0) throw std::invalid_argument("gradient_reversal: lambda must be >= 0");
  return a.tape->record("gradient_reversal", a.value(), {a.id},
                        [lambda](Tape& tp, int self) {
                          const Tensor& g = tp.grad(self);
                          Tensor& ga = tp.grad(tp.input(self, 0));
                          simd::axpy(-lambda, g.data(), ga.data(), g.size());
                        });
}

}  // namespace tcf::ad
