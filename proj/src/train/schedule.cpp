#include "tcf/train/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcf::train {

double LambdaSchedule::at(std::size_t epoch) const {
  if (epoch == 0 || rate == 0.0) return std::min(init, cap);
  return std::min(init * std::exp(rate * static_cast<double>(epoch)), cap);
}

void LambdaSchedule::validate() const {
  if (!(init >= 0.0)) throw std::invalid_argument("lambda schedule: init must be >= 0");
  if (!(rate >= 0.0)) throw std::invalid_argument("lambda schedule: rate must be >= 0");
  if (!(cap >= 0.0)) throw std::invalid_argument("lambda schedule: cap must be >= 0");
}

Lambdas lambda_schedule(const LambdaSchedule& l1, const LambdaSchedule& l2, std::size_t epoch) {
  return {l1.at(epoch), l2.at(epoch)};
}

}  // namespace tcf::train
