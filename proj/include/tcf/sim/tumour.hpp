#pragma once
// Tumour growth under chemotherapy and radiotherapy.
//
//   V_{t+1} = V_t (1 + rho log(K_cap / V_t) - beta_c C_t - (alpha_r d_t + beta_r d_t^2) + e_t)
//
// K = 2 binary treatments: bit 0 chemotherapy, bit 1 radiotherapy.  The
// features v_t (D_v = 1) are the chemo dose and radio dose that would be given
// at t.  Covariates x_t = [residual chemo concentration, growth marker].  The
// marker is a noisy reading of the patient's growth rate, so it confounds
// assignment through the tumour size.

#include <cstdint>
#include <utility>

#include <json.hpp>

#include "tcf/data/dataset.hpp"
#include "tcf/sim/ground_truth.hpp"
#include "tcf/sim/oracle.hpp"

namespace tcf::sim {

struct TumourParams {
  double rho = 0.03;
  double k_cap = 1150.0;  // cm^3, a 13 cm sphere
  double beta_c = 0.028;
  double alpha_r = 0.0398;
  double beta_r = 0.00398;
  double chemo_half_life = 1.0;  // steps
  double noise_std = 0.01;
  double gamma_c = 0.0;
  double gamma_r = 0.0;
  double diameter_threshold = 6.5;  // cm
  double d_max = 13.0;              // cm
  std::size_t diameter_window = 5;
  double heterogeneity = 0.1;  // relative sd of per-patient rho, beta_c, alpha_r
  double initial_diameter_min = 3.0;
  double initial_diameter_max = 8.0;
  double chemo_dose_min = 3.0;
  double chemo_dose_max = 6.0;
  double radio_dose_min = 1.5;
  double radio_dose_max = 2.5;
  double volume_floor = 1e-3;
  std::size_t steps = 30;
  std::size_t patients = 100;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

nlohmann::json to_json(const TumourParams& p);
TumourParams tumour_params_from_json(const nlohmann::json& j);

double diameter_from_volume(double volume);
double volume_from_diameter(double diameter);

class TumourSimulator : public Oracle {
 public:
  explicit TumourSimulator(TumourParams params);

  // Dataset plus the 4-arm potential outcome table for every emitted step
  // that has a successor.
  std::pair<data::Dataset, GroundTruthTable> simulate() const;

  data::Dims dims() const override { return {2, 1, 2}; }
  std::size_t entity_count() const override { return params_.patients; }
  std::string entity_id(std::size_t index) const override;
  std::vector<double> rollout(std::size_t entity, std::size_t s,
                              std::span<const PlanStep> plan) const override;
  bool minimize() const override { return true; }

  const TumourParams& params() const { return params_; }

  // Per-patient draws, fixed by (seed, patient).
  struct Patient {
    double v0, rho, beta_c, alpha_r, beta_r, marker;
    std::vector<double> chemo_dose, radio_dose, noise, u_chemo, u_radio;
  };
  Patient patient(std::size_t index) const;

  // One volume update; negative or zero results are clamped to the floor.
  double step_volume(const Patient& p, double volume, double concentration,
                     double radio_dose, double noise) const;

 private:
  TumourParams params_;
};

std::pair<data::Dataset, GroundTruthTable> simulate_tumour(const TumourParams& params);

}  // namespace tcf::sim
