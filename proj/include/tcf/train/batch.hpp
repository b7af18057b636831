#pragma once
// Padded minibatches.  Row b is one trajectory; step s runs over 0..T-1 where
// T is the longest trajectory in the batch, and shorter rows are zero-padded
// and masked.  The encoder state after step s is Phi(H_{s+1}); the head
// predicts y_{s+1} from it under a_s.
//
// Decoder rows stack the encoder states of every step: row r = s * B + b.
// Horizon j (1..tau_max-1) feeds [v_{s+j}, a_{s+j-1}] plus the previous
// prediction and is scored against y_{s+j+1} under a_{s+j}.

#include <cstddef>
#include <span>
#include <vector>

#include "tcf/autodiff/tensor.hpp"
#include "tcf/data/dataset.hpp"
#include "tcf/net/config.hpp"

namespace tcf::train {

struct DecoderHorizon {
  ad::Tensor input;      // R x (d_v K + K)
  ad::Tensor a;          // R x K, treatment scored at this horizon
  ad::Tensor y;          // R x 1, target y_{s+j+1}
  ad::Tensor has_state;  // R x 1, s + j < length
  ad::Tensor has_target; // R x 1, s + j + 1 < length
};

struct Batch {
  std::size_t rows = 0;   // B
  std::size_t steps = 0;  // T
  std::vector<ad::Tensor> enc_in;     // T x (B x encoder_input)
  std::vector<ad::Tensor> a;          // T x (B x K)
  std::vector<ad::Tensor> y_next;     // T x (B x 1)
  std::vector<ad::Tensor> has_step;   // T x (B x 1), s < length
  std::vector<ad::Tensor> has_next;   // T x (B x 1), s + 1 < length
  // Corrupted stream; empty when the batch has none.
  std::vector<ad::Tensor> enc_in_cf;
  std::vector<ad::Tensor> a_cf;
  std::vector<DecoderHorizon> decoder;  // tau_max - 1 entries

  bool has_counterfactual() const { return !enc_in_cf.empty(); }
  double count(const std::vector<ad::Tensor>& masks) const;
};

// `corrupted` is empty or parallel to `factual` (same lengths and ids).
// Trajectories must already be normalized.
Batch make_batch(std::span<const data::Trajectory* const> factual,
                 std::span<const data::Trajectory* const> corrupted, const net::ModelConfig& cfg);

}  // namespace tcf::train
