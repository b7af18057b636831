#include "tcf/effects/recommend.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tcf/data/dataset.hpp"

namespace tcf::effects {

std::string Candidate::encoding() const {
  std::string s;
  for (std::size_t j = 0; j < plan.size(); ++j) {
    if (j) s += '|';
    for (auto b : plan[j].a) s += b ? '1' : '0';
  }
  return s;
}

Candidate make_candidate(const std::vector<std::uint8_t>& option, std::size_t offset,
                         std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("candidate horizon must be >= 1");
  const bool none = std::all_of(option.begin(), option.end(), [](auto b) { return b == 0; });
  if (!none && (offset < 1 || offset > horizon))
    throw std::out_of_range("candidate offset " + std::to_string(offset) + " outside 1.." +
                            std::to_string(horizon));
  Candidate c;
  c.option = option;
  c.offset = none ? 0 : offset;
  c.plan.assign(horizon, net::PlannedStep{std::vector<std::uint8_t>(option.size(), 0), {}});
  if (!none) c.plan[offset - 1].a = option;
  return c;
}

std::vector<Candidate> default_candidates(std::size_t k, std::size_t horizon) {
  std::vector<Candidate> out;
  out.push_back(make_candidate(std::vector<std::uint8_t>(k, 0), 0, horizon));
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask)
    for (std::size_t off = 1; off <= horizon; ++off)
      out.push_back(make_candidate(data::bits_from_mask(mask, k), off, horizon));
  return out;
}

std::vector<std::size_t> rank_scores(const std::vector<double>& scores,
                                     const std::vector<Candidate>& candidates, Goal goal) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::string> keys;
  for (const auto& c : candidates) keys.push_back(c.encoding());
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b])
      return goal == Goal::Minimize ? scores[a] < scores[b] : scores[a] > scores[b];
    return keys[a] < keys[b];
  });
  return idx;
}

std::vector<RankedPlan> recommend(const net::Forecaster& fc, const data::History& h,
                                  std::size_t horizon, const std::vector<Candidate>& candidates,
                                  Goal goal) {
  if (horizon < 1 || horizon > fc.config().tau_max)
    throw std::out_of_range("horizon " + std::to_string(horizon) + " outside 1.." +
                            std::to_string(fc.config().tau_max));
  if (candidates.empty()) throw std::invalid_argument("recommend: no candidate plans");
  std::vector<net::Plan> plans;
  for (const auto& c : candidates) {
    if (c.plan.size() != horizon)
      throw std::invalid_argument("recommend: candidate '" + c.encoding() +
                                  "' does not span the horizon");
    plans.push_back(c.plan);
  }
  auto ys = fc.forecast_many(h, plans);
  std::vector<double> scores;
  for (const auto& y : ys) scores.push_back(y.back());
  std::vector<RankedPlan> out;
  for (auto i : rank_scores(scores, candidates, goal))
    out.push_back({candidates[i], ys[i], scores[i]});
  return out;
}

nlohmann::json to_json(const RankedPlan& r) {
  nlohmann::json plan = nlohmann::json::array();
  for (const auto& st : r.candidate.plan) plan.push_back({{"a", st.a}});
  return {{"option", r.candidate.option}, {"offset", r.candidate.offset},
          {"encoding", r.candidate.encoding()}, {"plan", plan},
          {"forecast", r.forecast}, {"score", r.score}};
}

Goal goal_from_string(const std::string& s) {
  if (s == "minimize") return Goal::Minimize;
  if (s == "maximize") return Goal::Maximize;
  throw std::invalid_argument("goal must be 'minimize' or 'maximize', got '" + s + "'");
}

std::string to_string(Goal g) { return g == Goal::Minimize ? "minimize" : "maximize"; }

}  // namespace tcf::effects
