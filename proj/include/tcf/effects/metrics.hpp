#pragma once
// Evaluation on a held-out split.
//
// Base times are every `stride`-th history length t.  At each base:
//   factual         forecast under the observed treatments and features,
//                   scored against the observed outcomes (needs t + tau <= T)
//   counterfactual  every default candidate plan, scored against the
//                   simulator rollout of the same plan from the same state
//   Tr / TrT        the model's top-ranked candidate against the rollout's
//                   best: same treatment vector (Tr), and same offset (TrT)
// Errors are reported per horizon as percentages of `normalizer`.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcf/data/dataset.hpp"
#include "tcf/effects/recommend.hpp"
#include "tcf/net/forecaster.hpp"
#include "tcf/sim/oracle.hpp"
#include "tcf/sim/sim_config.hpp"

namespace tcf::effects {

struct HorizonError {
  std::size_t tau = 0;
  double rmse_pct = 0.0;
  double mae_pct = 0.0;
  std::size_t n = 0;
};

// 100 * RMSE / normalizer and 100 * MAE / normalizer.
HorizonError error_stats(const std::vector<double>& pred, const std::vector<double>& truth,
                         double normalizer, std::size_t tau = 0);

struct MetricsReport {
  std::size_t tau = 0;
  double normalizer = 1.0;
  std::size_t entities = 0;
  std::size_t bases = 0;
  std::vector<HorizonError> factual;
  std::vector<HorizonError> counterfactual;  // empty without ground truth
  bool has_ground_truth = false;
  std::optional<double> tr_acc;
  std::optional<double> trt_acc;
  std::size_t decisions = 0;
  std::string goal;
};

struct EvalOptions {
  std::size_t tau = 1;
  std::size_t stride = 5;
  double normalizer = 0.0;  // 0: max |y| over the evaluated data
  Goal goal = Goal::Minimize;
};

// `oracle` may be null (factual-only report).  `dump`, when given, receives
// one record per evaluated base.
MetricsReport evaluate(const net::Forecaster& fc, const data::Dataset& test,
                       const sim::Oracle* oracle, const EvalOptions& opts,
                       std::vector<nlohmann::json>* dump = nullptr);

// 1.05 K_cap for the tumour model, max |y| of `data` otherwise.
double outcome_normalizer(const sim::SimSpec* spec, const data::Dataset& data);
Goal default_goal(const sim::SimSpec* spec);

nlohmann::json to_json(const MetricsReport& r);
std::string to_table(const MetricsReport& r);

}  // namespace tcf::effects
