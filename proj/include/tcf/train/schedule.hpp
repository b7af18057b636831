#pragma once

#include <cstddef>

namespace tcf::train {

struct LambdaSchedule {
  double init = 0.1;
  double rate = 0.05;
  double cap = 1.0;

  // min(init * exp(rate * epoch), cap)
  double at(std::size_t epoch) const;
  void validate() const;  // throws std::invalid_argument
};

struct Lambdas {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

Lambdas lambda_schedule(const LambdaSchedule& l1, const LambdaSchedule& l2, std::size_t epoch);

}  // namespace tcf::train
