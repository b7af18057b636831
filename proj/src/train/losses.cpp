#include "tcf/train/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tcf/net/network.hpp"

namespace tcf::train {
namespace {

void check_rows(const char* op, const ad::Shape& want, const ad::Tensor& t, std::size_t cols) {
  if (t.rows() != want.rows || t.cols() != cols)
    throw ad::ShapeError(std::string(op) + ": got " + t.shape().str() + " for " +
                         std::to_string(want.rows) + " rows");
}

// Gate column per block: k >= 1 uses a_{k-1}, k = 0 uses prod (1 - a).
ad::Tensor gate(const ad::Tensor& a, std::size_t block) {
  ad::Tensor g(a.rows(), 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (block > 0) {
      g[r] = a(r, block - 1);
    } else {
      double p = 1.0;
      for (std::size_t k = 0; k < a.cols(); ++k) p *= 1.0 - a(r, k);
      g[r] = p;
    }
  }
  return g;
}

ad::Var block_of(ad::Var z, std::size_t k, std::size_t blocks) {
  const std::size_t d = z.shape().cols / blocks;
  if (k > 0) return ad::slice_cols(z, (k - 1) * d, k * d);
  ad::Var acc = ad::slice_cols(z, 0, d);
  for (std::size_t i = 1; i < blocks; ++i) acc = ad::add(acc, ad::slice_cols(z, i * d, (i + 1) * d));
  return ad::scale(acc, 1.0 / static_cast<double>(blocks));
}

ad::Tensor times(const ad::Tensor& g, const ad::Tensor& y) {
  ad::Tensor out(g.rows(), 1);
  for (std::size_t r = 0; r < g.rows(); ++r) out[r] = g[r] * y[r];
  return out;
}

ad::Var weighted_sum(ad::Var per_row, const ad::Tensor& weights) {
  ad::Tape& tape = *per_row.tape;
  return ad::sum(ad::mul(per_row, tape.constant(weights)));
}

}  // namespace

ad::Tensor mean_weights(const ad::Tensor& mask, double count) {
  ad::Tensor w(mask.rows(), 1);
  if (count <= 0) return w;
  for (std::size_t r = 0; r < mask.rows(); ++r) w[r] = mask[r] != 0.0 ? 1.0 / count : 0.0;
  return w;
}

ad::Var loss_treatment(ad::Var probs, const ad::Tensor& a, const ad::Tensor& weights) {
  const std::size_t k = a.cols();
  check_rows("loss_treatment(probs)", a.shape(), probs.value(), 2 * k);
  check_rows("loss_treatment(weights)", a.shape(), weights, 1);
  ad::Tensor select(a.rows(), 2 * k);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t i = 0; i < k; ++i) select(r, 2 * i + (a(r, i) != 0.0 ? 1 : 0)) = weights[r];
  ad::Tape& tape = *probs.tape;
  return ad::scale(ad::sum(ad::mul(ad::log(probs), tape.constant(std::move(select)))), -1.0);
}

ad::Var loss_treatment(ad::Var probs, const ad::Tensor& a) {
  return loss_treatment(probs, a, ad::Tensor(a.rows(), 1, 1.0 / static_cast<double>(a.rows())));
}

ad::Var loss_outcome(ad::Var y_hat, const ad::Tensor& y, const ad::Tensor& weights) {
  check_rows("loss_outcome(y_hat)", y.shape(), y_hat.value(), 1);
  check_rows("loss_outcome(weights)", y.shape(), weights, 1);
  ad::Tape& tape = *y_hat.tape;
  return weighted_sum(ad::square(ad::sub(y_hat, tape.constant(y))), weights);
}

ad::Var loss_outcome(ad::Var y_hat, const ad::Tensor& y) {
  return loss_outcome(y_hat, y, ad::Tensor(y.rows(), 1, 1.0 / static_cast<double>(y.rows())));
}

ad::Var floored_log_ratio(ad::Var d_f, ad::Var d_cf, ad::Var n, double eps) {
  const ad::Tensor& f = d_f.value();
  const ad::Tensor& c = d_cf.value();
  const ad::Tensor& nv = n.value();
  if (f.cols() != 1 || c.shape() != f.shape() || nv.shape() != f.shape())
    throw ad::ShapeError("floored_log_ratio: shapes " + f.shape().str() + ", " +
                         c.shape().str() + ", " + nv.shape().str());
  const std::size_t rows = f.rows();
  ad::Tensor out(rows, 1);
  for (std::size_t r = 0; r < rows; ++r) {
    const double lo = eps / std::max(nv[r], 1e-300);
    out[r] = std::log(std::max(f[r], lo)) - std::log(std::max(c[r], lo));
  }
  return d_f.tape->record(
      "floored_log_ratio", std::move(out), {d_f.id, d_cf.id, n.id},
      [eps, rows](ad::Tape& tp, int self) {
        const int i_f = tp.input(self, 0), i_c = tp.input(self, 1), i_n = tp.input(self, 2);
        const ad::Tensor& g = tp.grad(self);
        const ad::Tensor& f = tp.value(i_f);
        const ad::Tensor& c = tp.value(i_c);
        const ad::Tensor& nv = tp.value(i_n);
        std::vector<double> gf(rows), gc(rows), gn(rows);
        for (std::size_t r = 0; r < rows; ++r) {
          const double n_r = std::max(nv[r], 1e-300);
          const double lo = eps / n_r;
          // d/dn log(eps / n) = -1/n, and only when n is above its clamp.
          const double dn = nv[r] > 1e-300 ? -1.0 / n_r : 0.0;
          if (f[r] > lo) gf[r] = g[r] / f[r];
          else gn[r] += g[r] * dn;
          if (c[r] > lo) gc[r] = -g[r] / c[r];
          else gn[r] -= g[r] * dn;
        }
        if (tp.requires_grad(i_f))
          for (std::size_t r = 0; r < rows; ++r) tp.grad(i_f)[r] += gf[r];
        if (tp.requires_grad(i_c))
          for (std::size_t r = 0; r < rows; ++r) tp.grad(i_c)[r] += gc[r];
        if (tp.requires_grad(i_n))
          for (std::size_t r = 0; r < rows; ++r) tp.grad(i_n)[r] += gn[r];
      });
}

ad::Tensor individual_arm(const ad::Tensor& a, std::size_t k) {
  ad::Tensor out(a.rows(), a.cols());
  if (k > 0)
    for (std::size_t r = 0; r < a.rows(); ++r) out(r, k - 1) = a(r, k - 1);
  return out;
}

ad::Var loss_contrastive(std::span<const ad::Var> y_f, std::span<const ad::Var> y_cf, ad::Var z,
                         const ad::Tensor& a, const ad::Tensor& y, const ad::Tensor& weights,
                         const ContrastiveOptions& opts) {
  const std::size_t k = a.cols();
  if (y_f.size() != k + 1 || y_cf.size() != k + 1)
    throw std::invalid_argument("loss_contrastive: expected K + 1 predictions per stream");
  for (std::size_t i = 0; i <= k; ++i) {
    check_rows("loss_contrastive(y_f)", y.shape(), y_f[i].value(), 1);
    check_rows("loss_contrastive(y_cf)", y.shape(), y_cf[i].value(), 1);
  }
  check_rows("loss_contrastive(weights)", y.shape(), weights, 1);
  if (z.shape().rows != y.rows() || z.shape().cols % k != 0)
    throw ad::ShapeError("loss_contrastive: z " + z.shape().str() + " for K=" + std::to_string(k));
  ad::Tape& tape = *z.tape;
  ad::Var total;
  for (std::size_t i = 0; i <= k; ++i) {
    ad::Var target = tape.constant(times(gate(a, i), y));
    ad::Var d_f = ad::abs(ad::sub(y_f[i], target));
    ad::Var d_cf = ad::abs(ad::sub(y_cf[i], target));
    ad::Var n = ad::sum_cols(ad::abs(block_of(z, i, k)));
    ad::Var term = floored_log_ratio(d_f, d_cf, n, opts.floor);
    total = i == 0 ? term : ad::add(total, term);
  }
  ad::Var s = weighted_sum(total, weights);
  return opts.invert_ratio ? s : ad::scale(s, -1.0);
}

ad::Var loss_contrastive(ad::Var y_f, ad::Var y_cf, ad::Var z, const ad::Tensor& a,
                         const ad::Tensor& y, const ad::Tensor& weights,
                         const ContrastiveOptions& opts) {
  const std::vector<ad::Var> f(a.cols() + 1, y_f), cf(a.cols() + 1, y_cf);
  return loss_contrastive(f, cf, z, a, y, weights, opts);
}

ad::Var loss_contrastive_literal(std::span<const ad::Var> y_f, std::span<const ad::Var> y_cf,
                                 ad::Var z, const ad::Tensor& a, const ad::Tensor& y,
                                 const ad::Tensor& weights, const ContrastiveOptions& opts) {
  const std::size_t k = a.cols();
  if (y_f.size() != k + 1 || y_cf.size() != k + 1)
    throw std::invalid_argument("loss_contrastive_literal: expected K + 1 predictions per stream");
  ad::Tape& tape = *z.tape;
  ad::Var total;
  for (std::size_t i = 0; i <= k; ++i) {
    ad::Var zi = block_of(z, i, k);
    ad::Var o = net::anchor(tape.constant(gate(a, i)), zi, tape.constant(y), 1);
    ad::Var f_f = net::density_ratio(zi, y_f[i], o, 1, opts.floor);
    ad::Var f_cf = net::density_ratio(zi, y_cf[i], o, 1, opts.floor);
    ad::Var term = ad::sub(ad::log(f_f), ad::log(f_cf));
    total = i == 0 ? term : ad::add(total, term);
  }
  ad::Var s = weighted_sum(total, weights);
  return opts.invert_ratio ? s : ad::scale(s, -1.0);
}

ad::Var loss_contrastive_literal(ad::Var y_f, ad::Var y_cf, ad::Var z, const ad::Tensor& a,
                                 const ad::Tensor& y, const ad::Tensor& weights,
                                 const ContrastiveOptions& opts) {
  const std::vector<ad::Var> f(a.cols() + 1, y_f), cf(a.cols() + 1, y_cf);
  return loss_contrastive_literal(f, cf, z, a, y, weights, opts);
}

double contrastive_term(double f_f, double f_cf, bool invert_ratio) {
  const double v = std::log(f_f / f_cf);
  return invert_ratio ? v : -v;
}

}  // namespace tcf::train
