#pragma once
// Effect estimates from a trained forecaster, in raw outcome units.
//
// CATE of treatment k at horizon tau: the forecast at t+tau under a plan with
// no treatment before the last step and e_k at the last step, minus the same
// plan with no treatment at the last step.
//
// Interaction of a treatment vector a (at the last plan step):
//   (Y[a] - Y[a0]) - sum_k a_k (Y[e_k] - Y[a0])         active-only (default)
//   (Y[a] - Y[a0]) - sum_k     (Y[e_k] - Y[a0])         literal
// Both are computed from one OutcomeSet.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcf/net/forecaster.hpp"

namespace tcf::effects {

enum class InteractionForm { ActiveOnly, Literal };

struct CateEstimate {
  std::string entity_id;
  std::size_t t = 0;  // history length
  std::size_t k = 0;
  std::size_t tau = 1;
  double value = 0.0;
};

struct InteractionEstimate {
  std::string entity_id;
  std::size_t t = 0;
  std::vector<std::uint8_t> a;
  std::size_t tau = 1;
  double value = 0.0;
};

// Plan of length tau with all-zero treatments and `last` at the final step.
net::Plan last_step_plan(std::size_t k, std::size_t tau, const std::vector<std::uint8_t>& last);

// Forecast difference at the last step between two plans of equal length.
double contrast(const net::Forecaster& fc, const data::History& h, const net::Plan& treated,
                const net::Plan& control);

// Throws std::out_of_range for k >= K or tau outside 1..tau_max.
CateEstimate estimate_cate(const net::Forecaster& fc, const data::History& h, std::size_t k,
                           std::size_t tau, const std::string& entity_id = "");
// All K CATEs from a single OutcomeSet.
std::vector<CateEstimate> estimate_cates(const net::Forecaster& fc, const data::History& h,
                                         std::size_t tau, const std::string& entity_id = "");

double interaction_from_outcomes(const net::OutcomeSet& os,
                                 InteractionForm form = InteractionForm::ActiveOnly);

InteractionEstimate estimate_interaction(const net::Forecaster& fc, const data::History& h,
                                         const std::vector<std::uint8_t>& a, std::size_t tau = 1,
                                         InteractionForm form = InteractionForm::ActiveOnly,
                                         const std::string& entity_id = "");

nlohmann::json to_json(const CateEstimate& e);
nlohmann::json to_json(const InteractionEstimate& e);

}  // namespace tcf::effects
