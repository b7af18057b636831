#pragma once
// Pseudo-counterfactual generation by corrupting one treatment position.
//
// At each step a position k* is drawn uniformly from 0..K-1; its bit is
// inverted and its feature column mapped x -> 1 - x.  Features must already be
// min-max normalized into [0, 1].  Both maps are involutions, so applying a
// record twice restores the input exactly.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcf/data/dataset.hpp"

namespace tcf::cf {

struct CorruptionRecord {
  std::size_t t = 0;         // 0-based step index
  std::size_t position = 0;  // k*
  std::uint8_t a_before = 0;
  std::uint8_t a_after = 0;
  std::vector<double> v_before;  // column k*, D_v entries
  std::vector<double> v_after;
};

struct CorruptionOptions {
  std::size_t positions = 1;  // distinct positions flipped per step
};

struct CorruptedStep {
  std::vector<double> v;
  std::vector<std::uint8_t> a;
  std::vector<CorruptionRecord> records;  // one per flipped position
};

// Flip position k of (v, a).  Throws std::invalid_argument if a feature of the
// column lies outside [0, 1] or k >= K.
CorruptedStep corrupt_step_at(const std::vector<double>& v, const std::vector<std::uint8_t>& a,
                              const data::Dims& dims, std::size_t k, std::size_t t = 0);

CorruptedStep corrupt_step(const std::vector<double>& v, const std::vector<std::uint8_t>& a,
                           const data::Dims& dims, std::mt19937_64& rng,
                           const CorruptionOptions& opts = {}, std::size_t t = 0);

struct CorruptedTrajectory {
  data::Trajectory trajectory;
  std::vector<CorruptionRecord> records;
};

// x and y are left untouched.
CorruptedTrajectory corrupt_trajectory(const data::Trajectory& tr, const data::Dims& dims,
                                       std::mt19937_64& rng, const CorruptionOptions& opts = {});

// Re-applies `records` in reverse order; on a corrupted trajectory this
// restores the factual one.
void apply_records(data::Trajectory& tr, const data::Dims& dims,
                   const std::vector<CorruptionRecord>& records);

nlohmann::json to_json(const CorruptionRecord& r, const std::string& entity_id);
void save_records(const std::vector<std::pair<std::string, std::vector<CorruptionRecord>>>& all,
                  const std::string& path);

}  // namespace tcf::cf
