#include "tcf/data/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tcf::data {
namespace {

// Two-pass mean/std (population) for numerical stability.
FeatureScale zscore(const std::vector<double>& values) {
  FeatureScale f;
  if (values.empty()) {
    f.constant = true;
    return f;
  }
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));
  f.offset = mean;
  f.scale = sd;
  f.constant = !(sd > 1e-12 * std::max(1.0, std::fabs(mean)));
  if (f.constant) {
    f.offset = 0;
    f.scale = 1;
  }
  return f;
}

FeatureScale minmax(const std::vector<double>& values) {
  FeatureScale f;
  if (values.empty()) {
    f.constant = true;
    return f;
  }
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  f.offset = *lo;
  f.scale = *hi - *lo;
  f.constant = !(f.scale > 1e-12 * std::max(1.0, std::fabs(*lo)));
  if (f.constant) {
    f.offset = 0;
    f.scale = 1;
  }
  return f;
}

nlohmann::json scale_json(const FeatureScale& f) {
  return {{"offset", f.offset}, {"scale", f.scale}, {"constant", f.constant}};
}

FeatureScale scale_from_json(const nlohmann::json& j) {
  FeatureScale f;
  f.offset = j.at("offset").get<double>();
  f.scale = j.at("scale").get<double>();
  f.constant = j.at("constant").get<bool>();
  return f;
}

template <typename Fn>
Dataset transform(const Dataset& ds, const NormStats& st, Fn fn, bool snap_v) {
  if (st.x.size() != ds.dims.d_x || st.v.size() != ds.dims.d_v * ds.dims.k)
    throw std::invalid_argument("norm stats do not match dataset dimensions");
  Dataset out = ds;
  for (auto& tr : out.trajectories)
    for (auto& s : tr.steps) {
      for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] = fn(st.x[i], s.x[i]);
      for (std::size_t i = 0; i < s.v.size(); ++i) {
        s.v[i] = fn(st.v[i], s.v[i]);
        if (snap_v) s.v[i] = snap_feature(s.v[i]);
      }
      s.y = fn(st.y, s.y);
    }
  return out;
}

}  // namespace

double snap_feature(double v) {
  constexpr double grid = 1099511627776.0;  // 2^40
  return std::nearbyint(v * grid) / grid;
}

NormStats fit_stats(const Dataset& train) {
  const Dims& d = train.dims;
  std::vector<std::vector<double>> xs(d.d_x), vs(d.d_v * d.k);
  std::vector<double> ys;
  for (const auto& tr : train.trajectories)
    for (const auto& s : tr.steps) {
      for (std::size_t i = 0; i < d.d_x; ++i) xs[i].push_back(s.x[i]);
      for (std::size_t i = 0; i < vs.size(); ++i) vs[i].push_back(s.v[i]);
      ys.push_back(s.y);
    }
  NormStats st;
  for (const auto& col : xs) st.x.push_back(zscore(col));
  for (const auto& col : vs) st.v.push_back(minmax(col));
  st.y = zscore(ys);
  return st;
}

void normalize_step(TimeStep& s, const NormStats& st) {
  for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] = st.x[i].apply(s.x[i]);
  for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = snap_feature(st.v[i].apply(s.v[i]));
  s.y = st.y.apply(s.y);
}

Dataset normalize(const Dataset& ds, const NormStats& stats) {
  return transform(
      ds, stats, [](const FeatureScale& f, double v) { return f.apply(v); }, true);
}

Dataset denormalize(const Dataset& ds, const NormStats& stats) {
  return transform(
      ds, stats, [](const FeatureScale& f, double v) { return f.invert(v); }, false);
}

nlohmann::json to_json(const NormStats& stats) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["x"] = nlohmann::json::array();
  for (const auto& f : stats.x) j["x"].push_back(scale_json(f));
  j["v"] = nlohmann::json::array();
  for (const auto& f : stats.v) j["v"].push_back(scale_json(f));
  j["y"] = scale_json(stats.y);
  return j;
}

NormStats norm_stats_from_json(const nlohmann::json& j) {
  NormStats st;
  for (const auto& f : j.at("x")) st.x.push_back(scale_from_json(f));
  for (const auto& f : j.at("v")) st.v.push_back(scale_from_json(f));
  st.y = scale_from_json(j.at("y"));
  return st;
}

void save_norm_stats(const NormStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(stats).dump(2) << '\n';
}

NormStats load_norm_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return norm_stats_from_json(nlohmann::json::parse(in));
}

}  // namespace tcf::data
