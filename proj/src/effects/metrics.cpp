#include "tcf/effects/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "tcf/data/history.hpp"
#include "tcf/effects/estimators.hpp"

namespace tcf::effects {
namespace {

struct Accumulator {
  std::vector<std::vector<double>> pred, truth;
  explicit Accumulator(std::size_t tau) : pred(tau), truth(tau) {}
  void add(std::size_t j, double p, double t) {
    pred[j].push_back(p);
    truth[j].push_back(t);
  }
  std::vector<HorizonError> finish(double norm) const {
    std::vector<HorizonError> out;
    for (std::size_t j = 0; j < pred.size(); ++j) out.push_back(error_stats(pred[j], truth[j], norm, j + 1));
    return out;
  }
};

nlohmann::json horizons_json(const std::vector<HorizonError>& hs) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& h : hs)
    a.push_back({{"tau", h.tau}, {"rmse_pct", h.rmse_pct}, {"mae_pct", h.mae_pct}, {"n", h.n}});
  return a;
}

}  // namespace

HorizonError error_stats(const std::vector<double>& pred, const std::vector<double>& truth,
                         double normalizer, std::size_t tau) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("error_stats: prediction and truth sizes differ");
  if (!(normalizer > 0)) throw std::invalid_argument("error_stats: normalizer must be > 0");
  HorizonError h;
  h.tau = tau;
  h.n = pred.size();
  if (pred.empty()) return h;
  double se = 0, ae = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - truth[i];
    se += e * e;
    ae += std::fabs(e);
  }
  const double n = static_cast<double>(pred.size());
  h.rmse_pct = 100.0 * std::sqrt(se / n) / normalizer;
  h.mae_pct = 100.0 * (ae / n) / normalizer;
  return h;
}

double outcome_normalizer(const sim::SimSpec* spec, const data::Dataset& data) {
  if (spec)
    if (const auto* t = std::get_if<sim::TumourParams>(spec)) return 1.05 * t->k_cap;
  double m = 0;
  for (const auto& tr : data.trajectories)
    for (const auto& st : tr.steps) m = std::max(m, std::fabs(st.y));
  return m > 0 ? m : 1.0;
}

Goal default_goal(const sim::SimSpec* spec) {
  if (spec && std::holds_alternative<sim::SyntheticConfig>(*spec)) return Goal::Maximize;
  return Goal::Minimize;
}

MetricsReport evaluate(const net::Forecaster& fc, const data::Dataset& test,
                       const sim::Oracle* oracle, const EvalOptions& opts,
                       std::vector<nlohmann::json>* dump) {
  const auto& cfg = fc.config();
  if (opts.tau < 1 || opts.tau > cfg.tau_max)
    throw std::out_of_range("horizon " + std::to_string(opts.tau) + " outside 1.." +
                            std::to_string(cfg.tau_max));
  if (opts.stride < 1) throw std::invalid_argument("evaluate: stride must be >= 1");
  if (!(test.dims == cfg.dims()))
    throw std::invalid_argument("evaluate: data dimensions do not match the model");

  MetricsReport rep;
  rep.tau = opts.tau;
  rep.normalizer = opts.normalizer > 0 ? opts.normalizer : outcome_normalizer(nullptr, test);
  rep.goal = to_string(opts.goal);
  rep.has_ground_truth = oracle != nullptr;

  std::map<std::string, std::size_t> oracle_index;
  if (oracle)
    for (std::size_t i = 0; i < oracle->entity_count(); ++i) oracle_index[oracle->entity_id(i)] = i;

  const std::size_t tau = opts.tau;
  const auto candidates = default_candidates(cfg.k, tau);
  Accumulator factual(tau), counterfactual(tau);
  std::size_t tr_hits = 0, trt_hits = 0;

  for (const auto& tr : test.trajectories) {
    std::size_t oi = 0;
    bool has_oracle = false;
    if (oracle) {
      auto it = oracle_index.find(tr.entity_id);
      if (it == oracle_index.end())
        throw std::invalid_argument("evaluate: entity '" + tr.entity_id +
                                    "' is unknown to the simulator");
      oi = it->second;
      has_oracle = true;
    }
    bool counted = false;
    for (std::size_t t = opts.stride; t <= tr.length(); t += opts.stride) {
      const auto h = data::build_history(tr, test.dims, t);
      const std::size_t s = t - 1;
      nlohmann::json rec = {{"entity_id", tr.entity_id}, {"t", t}};
      bool used = false;

      if (t + tau <= tr.length()) {
        net::Plan plan;
        for (std::size_t j = 0; j < tau; ++j) plan.push_back({tr.steps[s + j].a, tr.steps[s + j].v});
        auto y = fc.forecast(h, plan);
        for (std::size_t j = 0; j < tau; ++j) factual.add(j, y[j], tr.steps[s + j + 1].y);
        used = true;
      }

      if (has_oracle) {
        std::vector<net::Plan> plans;
        for (const auto& c : candidates) plans.push_back(fc.complete_plan(h, c.plan));
        auto preds = fc.forecast_many(h, plans);
        std::vector<double> model_scores, true_scores;
        for (std::size_t c = 0; c < plans.size(); ++c) {
          std::vector<sim::PlanStep> steps;
          for (const auto& st : plans[c]) steps.push_back({st.a, st.v});
          auto truth = oracle->rollout(oi, s, steps);
          for (std::size_t j = 0; j < tau; ++j) counterfactual.add(j, preds[c][j], truth[j]);
          model_scores.push_back(preds[c].back());
          true_scores.push_back(truth.back());
        }
        const auto& picked = candidates[rank_scores(model_scores, candidates, opts.goal).front()];
        const auto& best = candidates[rank_scores(true_scores, candidates, opts.goal).front()];
        const bool tr_ok = picked.option == best.option;
        const bool trt_ok = tr_ok && picked.offset == best.offset;
        tr_hits += tr_ok;
        trt_hits += trt_ok;
        ++rep.decisions;
        rec["recommended"] = picked.encoding();
        rec["oracle_best"] = best.encoding();
        used = true;
      }

      if (used) {
        ++rep.bases;
        counted = true;
        if (dump) {
          auto cates = estimate_cates(fc, h, 1, tr.entity_id);
          nlohmann::json cj = nlohmann::json::array();
          for (const auto& c : cates) cj.push_back(c.value);
          rec["cate_tau1"] = cj;
          rec["delta_ci_all"] =
              estimate_interaction(fc, h, std::vector<std::uint8_t>(cfg.k, 1), 1).value;
          dump->push_back(std::move(rec));
        }
      }
    }
    rep.entities += counted;
  }
  rep.factual = factual.finish(rep.normalizer);
  if (oracle) {
    rep.counterfactual = counterfactual.finish(rep.normalizer);
    if (rep.decisions > 0) {
      rep.tr_acc = static_cast<double>(tr_hits) / static_cast<double>(rep.decisions);
      rep.trt_acc = static_cast<double>(trt_hits) / static_cast<double>(rep.decisions);
    }
  }
  return rep;
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j = {{"schema_version", 1},
                      {"tau", r.tau},
                      {"normalizer", r.normalizer},
                      {"entities", r.entities},
                      {"bases", r.bases},
                      {"goal", r.goal},
                      {"has_ground_truth", r.has_ground_truth},
                      {"factual", horizons_json(r.factual)},
                      {"counterfactual", horizons_json(r.counterfactual)},
                      {"decisions", r.decisions},
                      {"tr_acc", nullptr},
                      {"trt_acc", nullptr}};
  if (r.tr_acc) j["tr_acc"] = *r.tr_acc;
  if (r.trt_acc) j["trt_acc"] = *r.trt_acc;
  return j;
}

std::string to_table(const MetricsReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %4s %10s %10s %8s\n", "set", "tau", "RMSE%", "MAE%", "n");
  out += line;
  auto rows = [&](const char* name, const std::vector<HorizonError>& hs) {
    for (const auto& h : hs) {
      std::snprintf(line, sizeof line, "%-16s %4zu %10.4f %10.4f %8zu\n", name, h.tau, h.rmse_pct,
                    h.mae_pct, h.n);
      out += line;
    }
  };
  rows("factual", r.factual);
  rows("counterfactual", r.counterfactual);
  if (r.tr_acc) {
    std::snprintf(line, sizeof line, "Tr Acc.  %7.2f%%   TrT Acc. %7.2f%%   (%zu decisions, tau=%zu)\n",
                  100 * *r.tr_acc, 100 * r.trt_acc.value_or(0), r.decisions, r.tau);
    out += line;
  }
  return out;
}

}  // namespace tcf::effects
