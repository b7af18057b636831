#include "tcf/train/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace tcf::train {

double grad_norm(const ad::ParameterSet& params) {
  double s = 0.0;
  for (const auto& p : params)
    for (double g : p.grad.values()) s += g * g;
  return std::sqrt(s);
}

Adam::Adam(const ad::ParameterSet& params, AdamConfig config) : cfg_(config) {
  if (!(cfg_.learning_rate > 0)) throw std::invalid_argument("adam: learning rate must be > 0");
  if (!(cfg_.beta1 >= 0 && cfg_.beta1 < 1 && cfg_.beta2 >= 0 && cfg_.beta2 < 1))
    throw std::invalid_argument("adam: moment decay rates must lie in [0, 1)");
  if (!(cfg_.clip_norm >= 0)) throw std::invalid_argument("adam: clip_norm must be >= 0");
  for (const auto& p : params) {
    m_.emplace_back(p.value.rows(), p.value.cols());
    v_.emplace_back(p.value.rows(), p.value.cols());
  }
}

double Adam::step(ad::ParameterSet& params) {
  if (params.size() != m_.size()) throw std::logic_error("adam: parameter set changed");
  const double norm = grad_norm(params);
  const double clip = cfg_.clip_norm > 0 && norm > cfg_.clip_norm ? cfg_.clip_norm / norm : 1.0;
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    auto& m = m_[i];
    auto& v = v_[i];
    const std::size_t n = p.value.size();
    if (p.grad.size() != n) continue;  // never reached by backward
    for (std::size_t j = 0; j < n; ++j) {
      const double g = p.grad[j] * clip;
      m[j] = cfg_.beta1 * m[j] + (1 - cfg_.beta1) * g;
      v[j] = cfg_.beta2 * v[j] + (1 - cfg_.beta2) * g * g;
      p.value[j] -= cfg_.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg_.epsilon);
    }
  }
  return norm;
}

}  // namespace tcf::train
