#pragma once
// Additive-plus-interaction generator with known potential outcomes.
//
//   y_{t+1} = c y_t + g(x_t) + sum_k w_k a_k vbar_k + sum_{j<k} u_jk a_j a_k + noise
//
// vbar_k is the mean of column k of v_t (just v_k when D_v = 1) and
// g(x) = 0.5 sin(x_0) + 0.3 tanh(x_1) + ...  Assignment of treatment k follows
// sigmoid(bias * (x_{k mod D_x} + 0.5 y_t)), and covariates respond to past
// treatments, which makes them time-varying confounders.

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tcf/data/dataset.hpp"
#include "tcf/sim/ground_truth.hpp"
#include "tcf/sim/oracle.hpp"

namespace tcf::sim {

struct SyntheticConfig {
  std::size_t k = 2;
  std::vector<double> w = {0.8, -0.6};
  // Upper-triangular pairwise weights, row-major over pairs (0,1),(0,2)..(1,2)..
  std::vector<double> u = {0.0};
  double c = 0.5;
  std::size_t d_x = 2;
  std::size_t d_v = 1;
  double bias = 1.5;
  double noise_std = 0.1;
  bool constant_v = false;
  double v_min = 0.5;
  double v_max = 1.5;
  std::size_t steps = 30;
  std::size_t entities = 500;
  std::uint64_t seed = 0;

  static std::size_t pair_count(std::size_t k) { return k * (k - 1) / 2; }
  // Index of pair (i, j), i < j, into u.
  static std::size_t pair_index(std::size_t i, std::size_t j, std::size_t k);
  double interaction(std::size_t i, std::size_t j) const { return u[pair_index(i, j, k)]; }

  void validate() const;  // throws std::invalid_argument
};

nlohmann::json to_json(const SyntheticConfig& c);
SyntheticConfig synthetic_config_from_json(const nlohmann::json& j);

class SyntheticSimulator : public Oracle {
 public:
  explicit SyntheticSimulator(SyntheticConfig config);

  std::pair<data::Dataset, GroundTruthTable> simulate() const;

  data::Dims dims() const override { return {config_.d_x, config_.d_v, config_.k}; }
  std::size_t entity_count() const override { return config_.entities; }
  std::string entity_id(std::size_t index) const override;
  std::vector<double> rollout(std::size_t entity, std::size_t s,
                              std::span<const PlanStep> plan) const override;
  bool minimize() const override { return false; }

  const SyntheticConfig& config() const { return config_; }

  // Deterministic part of y_{t+1} given the state and treatments at t.
  double mean_next(double y, const std::vector<double>& x, const std::vector<double>& v,
                   const std::vector<std::uint8_t>& a) const;

 private:
  struct Draws {
    std::vector<double> x0;
    double y0;
    std::vector<std::vector<double>> v;     // per step, d_v * k
    std::vector<double> noise;              // per step
    std::vector<std::vector<double>> eta;   // per step, d_x
    std::vector<std::vector<double>> u;     // per step, k uniforms
  };
  Draws draws(std::size_t index) const;
  std::vector<double> next_x(const std::vector<double>& x, const std::vector<std::uint8_t>& a,
                             const std::vector<double>& eta) const;
  std::vector<std::uint8_t> assign(const std::vector<double>& x, double y,
                                   const std::vector<double>& u) const;

  SyntheticConfig config_;
};

std::pair<data::Dataset, GroundTruthTable> simulate_synthetic(const SyntheticConfig& config);

}  // namespace tcf::sim
