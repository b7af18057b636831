#pragma once

#include <vector>

#include "tcf/autodiff/tape.hpp"

namespace tcf::train {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.0;  // global gradient norm clip; 0 disables
};

class Adam {
 public:
  Adam(const ad::ParameterSet& params, AdamConfig config);

  // Applies one update from Parameter::grad, then leaves the grads untouched.
  // Returns the global gradient norm before clipping.
  double step(ad::ParameterSet& params);

  std::size_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::vector<ad::Tensor> m_, v_;
  std::size_t t_ = 0;
};

double grad_norm(const ad::ParameterSet& params);

}  // namespace tcf::train
