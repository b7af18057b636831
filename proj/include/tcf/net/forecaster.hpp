#pragma once
// Inference on top of a trained Network.
//
// A plan lists the treatments from the history's current step t on: plan[0]
// is a_t (the step the history stops before) and produces y_hat_{t+1};
// plan[j] produces y_hat_{t+j+1}.  plan[0].v, when given, replaces v_t in the
// history before encoding; later steps' v feed the decoder.  An empty v means
// "use the default": v_t from the history for step 0, otherwise each
// feature's historical mean.

#include <cstdint>
#include <vector>

#include "tcf/autodiff/tensor.hpp"
#include "tcf/data/history.hpp"
#include "tcf/data/normalize.hpp"
#include "tcf/net/network.hpp"

namespace tcf::net {

struct PlannedStep {
  std::vector<std::uint8_t> a;
  std::vector<double> v;  // d_v * k, or empty for the default
};
using Plan = std::vector<PlannedStep>;

// Y_hat at the final plan step under the no-treatment vector, each one-hot
// vector and the requested vector, with the earlier plan steps held fixed.
struct OutcomeSet {
  std::vector<std::uint8_t> a;  // requested vector
  double none = 0.0;            // Y_hat[a_0]
  std::vector<double> single;   // Y_hat[e_k], k = 0..K-1
  double requested = 0.0;       // Y_hat[a]
};

class Forecaster {
 public:
  // `stats` converts between raw and normalized units.
  Forecaster(Network& net, data::NormStats stats);

  const ModelConfig& config() const { return net_.config(); }
  const data::NormStats& stats() const { return stats_; }
  Network& network() { return net_; }

  // Raw-unit API.
  std::vector<double> forecast(const data::History& history, const Plan& plan) const;
  // All plans must have the same length.
  std::vector<std::vector<double>> forecast_many(const data::History& history,
                                                 const std::vector<Plan>& plans) const;
  // Evaluates the K+2 treatment variants of the last step of `plan` in one
  // batch; the requested vector is plan.back().a.
  OutcomeSet outcome_set(const data::History& history, const Plan& plan) const;

  // Top-layer encoder state for the (raw) history, 1 x d_r.
  ad::Tensor encode(const data::History& history) const;

  // Plan with missing features filled from the history (raw units).
  Plan complete_plan(const data::History& history, const Plan& plan) const;
  // Per-feature mean of v over the history (raw units).
  std::vector<double> default_features(const data::History& history) const;

  // Normalized-unit core: returns normalized outcomes per plan.
  std::vector<std::vector<double>> forecast_normalized(const data::History& norm_history,
                                                       const std::vector<Plan>& norm_plans) const;

 private:
  void check_plan(const Plan& plan) const;
  data::History normalize_history(const data::History& raw) const;
  Plan normalize_plan(const Plan& raw) const;

  Network& net_;
  data::NormStats stats_;
};

// Encoder input rows [x_s, v_s, a_{s-1}, y_s] for steps 0..t-1 of a
// (normalized) history, one 1 x width tensor per step.
std::vector<ad::Tensor> encoder_inputs(const data::History& h);

}  // namespace tcf::net
