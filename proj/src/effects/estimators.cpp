#include "tcf/effects/estimators.hpp"

#include <stdexcept>

namespace tcf::effects {
namespace {

void check_tau(const net::Forecaster& fc, std::size_t tau) {
  if (tau < 1 || tau > fc.config().tau_max)
    throw std::out_of_range("horizon " + std::to_string(tau) + " outside 1.." +
                            std::to_string(fc.config().tau_max));
}

}  // namespace

net::Plan last_step_plan(std::size_t k, std::size_t tau, const std::vector<std::uint8_t>& last) {
  net::Plan p(tau, net::PlannedStep{std::vector<std::uint8_t>(k, 0), {}});
  p.back().a = last;
  return p;
}

double contrast(const net::Forecaster& fc, const data::History& h, const net::Plan& treated,
                const net::Plan& control) {
  auto ys = fc.forecast_many(h, {treated, control});
  return ys[0].back() - ys[1].back();
}

CateEstimate estimate_cate(const net::Forecaster& fc, const data::History& h, std::size_t k,
                           std::size_t tau, const std::string& entity_id) {
  const std::size_t K = fc.config().k;
  if (k >= K)
    throw std::out_of_range("treatment index " + std::to_string(k) + " outside 0.." +
                            std::to_string(K - 1));
  check_tau(fc, tau);
  std::vector<std::uint8_t> e(K, 0);
  e[k] = 1;
  const double v = contrast(fc, h, last_step_plan(K, tau, e),
                            last_step_plan(K, tau, std::vector<std::uint8_t>(K, 0)));
  return {entity_id, h.t, k, tau, v};
}

std::vector<CateEstimate> estimate_cates(const net::Forecaster& fc, const data::History& h,
                                         std::size_t tau, const std::string& entity_id) {
  check_tau(fc, tau);
  const std::size_t K = fc.config().k;
  auto os = fc.outcome_set(h, last_step_plan(K, tau, std::vector<std::uint8_t>(K, 0)));
  std::vector<CateEstimate> out;
  for (std::size_t k = 0; k < K; ++k) out.push_back({entity_id, h.t, k, tau, os.single[k] - os.none});
  return out;
}

double interaction_from_outcomes(const net::OutcomeSet& os, InteractionForm form) {
  if (os.a.size() != os.single.size())
    throw std::invalid_argument("outcome set: treatment vector and single effects differ in size");
  double v = os.requested - os.none;
  for (std::size_t k = 0; k < os.single.size(); ++k)
    if (form == InteractionForm::Literal || os.a[k]) v -= os.single[k] - os.none;
  return v;
}

InteractionEstimate estimate_interaction(const net::Forecaster& fc, const data::History& h,
                                         const std::vector<std::uint8_t>& a, std::size_t tau,
                                         InteractionForm form, const std::string& entity_id) {
  check_tau(fc, tau);
  auto os = fc.outcome_set(h, last_step_plan(fc.config().k, tau, a));
  return {entity_id, h.t, a, tau, interaction_from_outcomes(os, form)};
}

nlohmann::json to_json(const CateEstimate& e) {
  return {{"entity_id", e.entity_id}, {"t", e.t}, {"k", e.k}, {"tau", e.tau}, {"cate", e.value}};
}

nlohmann::json to_json(const InteractionEstimate& e) {
  return {{"entity_id", e.entity_id}, {"t", e.t},   {"a", e.a},
          {"tau", e.tau},             {"delta_ci", e.value}};
}

}  // namespace tcf::effects
