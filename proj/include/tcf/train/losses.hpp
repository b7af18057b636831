#pragma once
// Loss terms.  Every term takes a per-row weight column (rows x 1) and returns
// the weighted sum as a 1x1 node, so callers can pool several row groups into
// one mean by passing weights mask / count.

#include <cstddef>
#include <span>

#include "tcf/autodiff/tape.hpp"

namespace tcf::train {

// Column of `value` for every row where mask(r) != 0, scaled by 1 / count.
// Returns an all-zero column when the mask is empty.
ad::Tensor mean_weights(const ad::Tensor& mask, double count);

// -sum_k log P(a_k) per row.  probs: rows x 2K from treatment_probs,
// a: rows x K bits.
ad::Var loss_treatment(ad::Var probs, const ad::Tensor& a, const ad::Tensor& weights);
ad::Var loss_treatment(ad::Var probs, const ad::Tensor& a);  // plain row mean

// (y_hat - y)^2 per row.
ad::Var loss_outcome(ad::Var y_hat, const ad::Tensor& y, const ad::Tensor& weights);
ad::Var loss_outcome(ad::Var y_hat, const ad::Tensor& y);

// Elementwise log(max(d_f, eps / n)) - log(max(d_cf, eps / n)) on rows x 1
// inputs.  n is clamped below at 1e-300.  This is log(f_F / f_CF) for
// f = max(n * d, eps): the scale n cancels exactly wherever the floor is idle.
ad::Var floored_log_ratio(ad::Var d_f, ad::Var d_cf, ad::Var n, double eps);

struct ContrastiveOptions {
  // true:  sum_k log(f_F / f_CF)  (pulls the factual prediction to the anchor)
  // false: -sum_k log(f_F / f_CF)
  bool invert_ratio = true;
  double floor = ad::kNumericFloor;
};

// Contrastive term over k = 0..K.  Block k >= 1 is gated by a_k, block 0 by
// prod_k (1 - a_k) and uses the mean of the K blocks of z as its medium
// representation.  y_f[k], y_cf[k]: rows x 1 individual-outcome predictions
// for term k (K + 1 each); z: rows x (K d_z); a: rows x K factual bits;
// y: rows x 1 factual outcome the anchors carry.
ad::Var loss_contrastive(std::span<const ad::Var> y_f, std::span<const ad::Var> y_cf, ad::Var z,
                         const ad::Tensor& a, const ad::Tensor& y, const ad::Tensor& weights,
                         const ContrastiveOptions& opts = {});
// One prediction shared by all K + 1 terms.
ad::Var loss_contrastive(ad::Var y_f, ad::Var y_cf, ad::Var z, const ad::Tensor& a,
                         const ad::Tensor& y, const ad::Tensor& weights,
                         const ContrastiveOptions& opts = {});

// Treatment input of the k-th individual outcome: column k-1 of `a` kept,
// all others zero (k = 0: no treatment).
ad::Tensor individual_arm(const ad::Tensor& a, std::size_t k);

// Same quantity built literally from anchors and density ratios
// (f = max(||Z_k y_hat - O_k||_1, floor)).  Agrees with loss_contrastive up to
// rounding; its theta_z gradient is only zero up to rounding.
ad::Var loss_contrastive_literal(std::span<const ad::Var> y_f, std::span<const ad::Var> y_cf,
                                 ad::Var z, const ad::Tensor& a, const ad::Tensor& y,
                                 const ad::Tensor& weights, const ContrastiveOptions& opts = {});
ad::Var loss_contrastive_literal(ad::Var y_f, ad::Var y_cf, ad::Var z, const ad::Tensor& a,
                                 const ad::Tensor& y, const ad::Tensor& weights,
                                 const ContrastiveOptions& opts = {});

// One term from given density ratios: -log(f_F / f_CF), negated when inverted.
double contrastive_term(double f_f, double f_cf, bool invert_ratio);

}  // namespace tcf::train
