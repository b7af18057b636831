#pragma once
// Re-runnable data-generating process used as an evaluation oracle.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tcf/data/dataset.hpp"

namespace tcf::sim {

// One planned step in raw units: treatment bits (K) and features (D_v x K).
struct PlanStep {
  std::vector<std::uint8_t> a;
  std::vector<double> v;
};

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual data::Dims dims() const = 0;
  virtual std::size_t entity_count() const = 0;
  virtual std::string entity_id(std::size_t index) const = 0;
  // Outcomes y_{s+1} .. y_{s+len} when `plan` replaces the treatments from
  // step s (0-based) on.  The state at s is the factual one; noise draws are
  // the same as in the factual run.
  virtual std::vector<double> rollout(std::size_t entity, std::size_t s,
                                      std::span<const PlanStep> plan) const = 0;
  // True when lower outcomes are better (tumour volume).
  virtual bool minimize() const = 0;
};

}  // namespace tcf::sim
