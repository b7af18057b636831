#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "tcf/autodiff/tape.hpp"

namespace tcf::ad {

// Builds a scalar loss on the given tape from the current parameter values.
using LossBuilder = std::function<Var(Tape&)>;

enum class Stencil {
  Central2,  // (f(x+e) - f(x-e)) / 2e
  Central4,  // (-f(x+2e) + 8f(x+e) - 8f(x-e) + f(x-2e)) / 12e
  // Central4 at e and e/2 combined as (16 D(e/2) - D(e)) / 15.  Sixth order;
  // for losses with steep log terms.
  Richardson,
  // Ridders' extrapolation tableau over central differences with steps
  // e, e/1.4, e/1.4^2, ...; returns the entry with the smallest error
  // estimate.  Copes with steep regions and with roundoff on tiny gradients.
  Ridders,
};

// Derivative at 0 of `f(delta)` by the given stencil.
double finite_difference(const std::function<double(double)>& f, double eps, Stencil stencil);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// Compares the tape gradient of `loss` against finite differences for every
// scalar in `params`.  Relative error per entry is
//   |analytic - fd| / max(|analytic|, |fd|, 1e-12).
// Non-finite intermediates surface as NonFiniteError carrying the node id.
GradCheckResult grad_check(const LossBuilder& loss, ParameterSet& params,
                           double eps, Stencil stencil = Stencil::Central2);

// Gradient of `loss` at the current parameter values (params.grad is reset).
double evaluate_with_gradient(const LossBuilder& loss, ParameterSet& params);

}  // namespace tcf::ad
