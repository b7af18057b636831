#pragma once
// Feature scaling fitted on the training split.
//   x, y : z-score            (value - mean) / std
//   v    : min-max to [0, 1]  (value - min) / (max - min)
// Features with zero spread are passed through unchanged and flagged.
// Normalized v values are snapped to a 2^-40 grid so that x -> 1 - x is
// exact and therefore an involution in floating point.

#include <string>
#include <vector>

#include <json.hpp>

#include "tcf/data/dataset.hpp"

namespace tcf::data {

struct FeatureScale {
  double offset = 0.0;  // mean (x, y) or min (v)
  double scale = 1.0;   // std (x, y) or range (v)
  bool constant = false;

  double apply(double raw) const { return constant ? raw : (raw - offset) / scale; }
  double invert(double norm) const { return constant ? norm : norm * scale + offset; }
  // Scale factor for differences (effects) in raw units.
  double span() const { return constant ? 1.0 : scale; }
  bool operator==(const FeatureScale&) const = default;
};

struct NormStats {
  std::vector<FeatureScale> x;  // d_x
  std::vector<FeatureScale> v;  // d_v * k, same layout as TimeStep::v
  FeatureScale y;
  bool operator==(const NormStats&) const = default;
};

NormStats fit_stats(const Dataset& train);
double snap_feature(double v);
Dataset normalize(const Dataset& ds, const NormStats& stats);
Dataset denormalize(const Dataset& ds, const NormStats& stats);
void normalize_step(TimeStep& st, const NormStats& stats);

nlohmann::json to_json(const NormStats& stats);
NormStats norm_stats_from_json(const nlohmann::json& j);
void save_norm_stats(const NormStats& stats, const std::string& path);
NormStats load_norm_stats(const std::string& path);

}  // namespace tcf::data
