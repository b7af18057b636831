#pragma once
// The forecasting network.
//
//   encoder  GRU over [x_s, v_s, a_{s-1}, y_s]; its top-layer state is the
//            balanced representation Phi.  a_s never enters Phi(H_s).
//   G_y      outcome head on [Phi, a]              (tanh hidden, linear out)
//   G_a      K two-way classifiers on GRL(Phi)     (tanh hidden, softmax pairs)
//   Psi      medium representation on [Phi, a]     (dense + tanh, K blocks of d_z)
//   decoder  GRU over [v_j, a_{j-1}, y_hat_j], initialised from the encoder
//            layer states, sharing G_y and G_a with the encoder.
//
// All functions work on row batches: one row per (entity, step) pair.

#include <cstdint>
#include <vector>

#include "tcf/autodiff/layers.hpp"
#include "tcf/autodiff/tape.hpp"
#include "tcf/net/config.hpp"

namespace tcf::net {

// Recurrent state, one rows x d_r tensor per layer (bottom first).
struct RecurrentState {
  std::vector<ad::Var> layers;
  ad::Var top() const { return layers.back(); }
};

class Network {
 public:
  Network(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }

  RecurrentState zero_state(ad::Tape& tape, std::size_t rows);
  RecurrentState encoder_step(ad::Tape& tape, const RecurrentState& h, ad::Var input);
  RecurrentState decoder_step(ad::Tape& tape, const RecurrentState& h, ad::Var input);

  // rows x 1
  ad::Var outcome(ad::Tape& tape, ad::Var rep, ad::Var a);
  // rows x 2K; columns (2k, 2k+1) hold P(a_k = 0), P(a_k = 1).  The rep passes
  // through a gradient reversal layer with weight `grl_lambda` first.
  ad::Var treatment_probs(ad::Tape& tape, ad::Var rep, double grl_lambda);
  // The same heads without the reversal layer.
  ad::Var classify(ad::Tape& tape, ad::Var rep);
  // rows x (K * d_z)
  ad::Var medium(ad::Tape& tape, ad::Var rep, ad::Var a);

  // Parameter groups by role, as indices into params().
  std::vector<std::size_t> representation_params() const;  // theta_r
  std::vector<std::size_t> classifier_params() const;      // theta_a
  std::vector<std::size_t> outcome_params() const;         // theta_y
  std::vector<std::size_t> medium_params() const;          // theta_z

 private:
  ModelConfig config_;
  ad::ParameterSet params_;
  std::vector<ad::GruParams> encoder_;
  std::vector<ad::GruParams> decoder_;
  ad::DenseParams gy_hidden_, gy_out_;
  ad::DenseParams ga_hidden_, ga_out_;
  ad::DenseParams psi_;
};

// O_k = a_k * Z_k * y for every block k.  a: rows x K, z: rows x (K d_z),
// y: rows x 1.
ad::Var anchor(ad::Var a, ad::Var z, ad::Var y, std::size_t k);

// f_k = max(|| Z_k * y_hat - O_k ||_1, floor), rows x K.
ad::Var density_ratio(ad::Var z, ad::Var y_hat, ad::Var o, std::size_t k,
                      double floor = ad::kNumericFloor);

// Constant K x (K d) matrix whose row k has ones on block k.
ad::Tensor block_expansion(std::size_t k, std::size_t d);

}  // namespace tcf::net
