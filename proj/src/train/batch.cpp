#include "tcf/train/batch.hpp"

#include <algorithm>
#include <stdexcept>

namespace tcf::train {
namespace {

void encoder_rows(std::span<const data::Trajectory* const> trs, const net::ModelConfig& c,
                  std::size_t steps, std::vector<ad::Tensor>& in, std::vector<ad::Tensor>& a) {
  const std::size_t b_count = trs.size();
  in.assign(steps, ad::Tensor(b_count, c.encoder_input()));
  a.assign(steps, ad::Tensor(b_count, c.k));
  for (std::size_t b = 0; b < b_count; ++b) {
    const auto& st = trs[b]->steps;
    for (std::size_t s = 0; s < st.size(); ++s) {
      std::size_t col = 0;
      auto& row = in[s];
      for (double x : st[s].x) row(b, col++) = x;
      for (double v : st[s].v) row(b, col++) = v;
      for (std::size_t k = 0; k < c.k; ++k) row(b, col++) = s == 0 ? 0.0 : st[s - 1].a[k];
      row(b, col) = st[s].y;
      for (std::size_t k = 0; k < c.k; ++k) a[s](b, k) = st[s].a[k];
    }
  }
}

}  // namespace

double Batch::count(const std::vector<ad::Tensor>& masks) const {
  double n = 0;
  for (const auto& m : masks)
    for (double v : m.values()) n += v;
  return n;
}

Batch make_batch(std::span<const data::Trajectory* const> factual,
                 std::span<const data::Trajectory* const> corrupted, const net::ModelConfig& c) {
  if (factual.empty()) throw std::invalid_argument("make_batch: empty batch");
  if (!corrupted.empty() && corrupted.size() != factual.size())
    throw std::invalid_argument("make_batch: corrupted stream does not match the batch");
  const std::size_t n_v = c.d_v * c.k;
  Batch bt;
  bt.rows = factual.size();
  for (std::size_t b = 0; b < bt.rows; ++b) {
    const auto& tr = *factual[b];
    for (const auto& st : tr.steps)
      if (st.x.size() != c.d_x || st.v.size() != n_v || st.a.size() != c.k)
        throw std::invalid_argument("make_batch: trajectory '" + tr.entity_id +
                                    "' does not match the model dimensions");
    if (!corrupted.empty() && corrupted[b]->steps.size() != tr.steps.size())
      throw std::invalid_argument("make_batch: corrupted copy of '" + tr.entity_id +
                                  "' has a different length");
    bt.steps = std::max(bt.steps, tr.steps.size());
  }
  const std::size_t B = bt.rows, T = bt.steps;

  encoder_rows(factual, c, T, bt.enc_in, bt.a);
  if (!corrupted.empty()) encoder_rows(corrupted, c, T, bt.enc_in_cf, bt.a_cf);
  bt.y_next.assign(T, ad::Tensor(B, 1));
  bt.has_step.assign(T, ad::Tensor(B, 1));
  bt.has_next.assign(T, ad::Tensor(B, 1));
  for (std::size_t b = 0; b < B; ++b) {
    const auto& st = factual[b]->steps;
    for (std::size_t s = 0; s < st.size(); ++s) {
      bt.has_step[s][b] = 1.0;
      if (s + 1 < st.size()) {
        bt.has_next[s][b] = 1.0;
        bt.y_next[s][b] = st[s + 1].y;
      }
    }
  }

  const std::size_t R = T * B;
  for (std::size_t j = 1; j < c.tau_max; ++j) {
    DecoderHorizon h{ad::Tensor(R, n_v + c.k), ad::Tensor(R, c.k), ad::Tensor(R, 1),
                     ad::Tensor(R, 1), ad::Tensor(R, 1)};
    for (std::size_t s = 0; s < T; ++s)
      for (std::size_t b = 0; b < B; ++b) {
        const auto& st = factual[b]->steps;
        const std::size_t r = s * B + b, at = s + j;
        if (at >= st.size()) continue;
        std::size_t col = 0;
        for (double v : st[at].v) h.input(r, col++) = v;
        for (std::size_t k = 0; k < c.k; ++k) h.input(r, col++) = st[at - 1].a[k];
        for (std::size_t k = 0; k < c.k; ++k) h.a(r, k) = st[at].a[k];
        h.has_state[r] = 1.0;
        if (at + 1 < st.size()) {
          h.has_target[r] = 1.0;
          h.y[r] = st[at + 1].y;
        }
      }
    bt.decoder.push_back(std::move(h));
  }
  return bt;
}

}  // namespace tcf::train
