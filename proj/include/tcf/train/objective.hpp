#pragma once
// The training objective on one batch.
//
//   J = L_y + lambda1 * L_a + lambda2 * L_d
//
// L_a reaches the classifier heads directly and the representation through a
// gradient reversal layer, so the heads minimise it while the encoder and
// decoder maximise it.  The reported total follows the sign convention
// L_y - lambda1 * L_a + lambda2 * L_d.
//
//   L_y  squared error, pooled over the encoder one-step predictions and the
//        decoder's autoregressive predictions at horizons 2..tau_max
//   L_a  per-step sum over the K heads of the negative log-likelihood, pooled
//        over factual encoder, corrupted encoder and decoder states
//   L_d  contrastive term of the one-step factual prediction against the
//        prediction from the corrupted stream under the corrupted treatments

#include <string>

#include "tcf/autodiff/grad_check.hpp"
#include "tcf/autodiff/tape.hpp"
#include "tcf/net/network.hpp"
#include "tcf/train/batch.hpp"
#include "tcf/train/losses.hpp"

namespace tcf::train {

struct ObjectiveOptions {
  double lambda1 = 0.1;
  double lambda2 = 0.1;
  bool invert_ratio = true;
  double ratio_floor = ad::kNumericFloor;
  // false replaces the reversal layer by the identity; for checks only.
  bool reverse_gradient = true;
};

struct LossBreakdown {
  double l_y = 0.0;
  double l_a = 0.0;
  double l_d = 0.0;
  double total = 0.0;  // l_y - lambda1 * l_a + lambda2 * l_d
};

struct ObjectiveTerms {
  ad::Var l_y, l_a, l_d;
  ad::Var j;  // what backward runs on
  LossBreakdown breakdown;
};

// L_d is zero when the batch carries no corrupted stream.
ObjectiveTerms build_objective(ad::Tape& tape, net::Network& net, const Batch& batch,
                               const ObjectiveOptions& opts);

// Finite-difference check of the gradients backward() produces from J.  The
// reversal layer makes the gradient field non-conservative, so each parameter
// is compared against the function it actually descends: J for the classifier
// heads, the reported total (L_a entering with -lambda1) for everything else.
// Relative error uses max(|an|, |fd|, kGradFloor) as denominator: entries
// smaller than the floor sit below the difference quotient's roundoff and are
// held to an absolute 1e-4 * kGradFloor instead.  `below_floor` counts them.
inline constexpr double kGradFloor = 1e-6;
struct ObjectiveGradCheck {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  std::size_t below_floor = 0;
};
ObjectiveGradCheck check_objective_gradients(
    net::Network& net, const Batch& batch, const ObjectiveOptions& opts, double eps = 1e-4,
    ad::Stencil stencil = ad::Stencil::Ridders);

// Forward-only pooled squared error (L_y) on a batch.
double outcome_loss(net::Network& net, const Batch& batch);

}  // namespace tcf::train
