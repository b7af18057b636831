#pragma once
// Ranking candidate treatment plans by the forecast at the end of the horizon.
//
// A candidate applies one treatment vector at one offset (1-based step of the
// plan) and nothing elsewhere; the no-treatment plan has offset 0.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcf/net/forecaster.hpp"

namespace tcf::effects {

enum class Goal { Minimize, Maximize };

struct Candidate {
  std::vector<std::uint8_t> option;  // K bits
  std::size_t offset = 0;            // 0 for no treatment
  net::Plan plan;                    // length = horizon

  // Per-step bit strings joined by '|', e.g. "00|10|00"; the tie-break key.
  std::string encoding() const;
};

struct RankedPlan {
  Candidate candidate;
  std::vector<double> forecast;  // raw units, one per plan step
  double score = 0.0;            // forecast.back()
};

// No treatment plus every nonzero option at every offset 1..horizon.
std::vector<Candidate> default_candidates(std::size_t k, std::size_t horizon);
Candidate make_candidate(const std::vector<std::uint8_t>& option, std::size_t offset,
                         std::size_t horizon);

// Best first; ties broken by Candidate::encoding() ascending.  Throws
// std::out_of_range when horizon > tau_max, std::invalid_argument for an empty
// candidate set or a candidate of the wrong length.
std::vector<RankedPlan> recommend(const net::Forecaster& fc, const data::History& h,
                                  std::size_t horizon, const std::vector<Candidate>& candidates,
                                  Goal goal);

// Order scores the same way recommend() does; returns indices best first.
std::vector<std::size_t> rank_scores(const std::vector<double>& scores,
                                     const std::vector<Candidate>& candidates, Goal goal);

nlohmann::json to_json(const RankedPlan& r);
Goal goal_from_string(const std::string& s);  // "minimize" | "maximize"
std::string to_string(Goal g);

}  // namespace tcf::effects
