#include "tcf/sim/tumour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tcf/util/seed.hpp"

namespace tcf::sim {
namespace {

// Extra pre-drawn steps so rollouts may run past the last observed step.
constexpr std::size_t kRolloutSlack = 64;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

void TumourParams::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("tumour params: ") + what);
  };
  need(rho > 0, "rho must be > 0");
  need(k_cap > 0, "k_cap must be > 0");
  need(beta_c >= 0 && alpha_r >= 0 && beta_r >= 0, "kill coefficients must be >= 0");
  need(gamma_c >= 0 && gamma_r >= 0, "gamma_c and gamma_r must be >= 0");
  need(chemo_half_life > 0, "chemo_half_life must be > 0");
  need(noise_std >= 0, "noise_std must be >= 0");
  need(d_max > 0, "d_max must be > 0");
  need(diameter_window >= 1, "diameter_window must be >= 1");
  need(heterogeneity >= 0, "heterogeneity must be >= 0");
  need(initial_diameter_min > 0 && initial_diameter_max >= initial_diameter_min,
       "initial diameter range invalid");
  need(volume_from_diameter(initial_diameter_max) < k_cap,
       "initial volume must stay below k_cap");
  need(chemo_dose_max >= chemo_dose_min && chemo_dose_min >= 0, "chemo dose range invalid");
  need(radio_dose_max >= radio_dose_min && radio_dose_min >= 0, "radio dose range invalid");
  need(volume_floor > 0, "volume_floor must be > 0");
  need(steps >= 2, "steps must be >= 2");
  need(patients >= 1, "patients must be >= 1");
}

nlohmann::json to_json(const TumourParams& p) {
  return {{"rho", p.rho},
          {"k_cap", p.k_cap},
          {"beta_c", p.beta_c},
          {"alpha_r", p.alpha_r},
          {"beta_r", p.beta_r},
          {"chemo_half_life", p.chemo_half_life},
          {"noise_std", p.noise_std},
          {"gamma_c", p.gamma_c},
          {"gamma_r", p.gamma_r},
          {"diameter_threshold", p.diameter_threshold},
          {"d_max", p.d_max},
          {"diameter_window", p.diameter_window},
          {"heterogeneity", p.heterogeneity},
          {"initial_diameter_min", p.initial_diameter_min},
          {"initial_diameter_max", p.initial_diameter_max},
          {"chemo_dose_min", p.chemo_dose_min},
          {"chemo_dose_max", p.chemo_dose_max},
          {"radio_dose_min", p.radio_dose_min},
          {"radio_dose_max", p.radio_dose_max},
          {"volume_floor", p.volume_floor},
          {"steps", p.steps},
          {"patients", p.patients},
          {"seed", p.seed}};
}

TumourParams tumour_params_from_json(const nlohmann::json& j) {
  TumourParams p;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("rho", p.rho);
  get("k_cap", p.k_cap);
  get("beta_c", p.beta_c);
  get("alpha_r", p.alpha_r);
  get("beta_r", p.beta_r);
  get("chemo_half_life", p.chemo_half_life);
  get("noise_std", p.noise_std);
  get("gamma_c", p.gamma_c);
  get("gamma_r", p.gamma_r);
  get("diameter_threshold", p.diameter_threshold);
  get("d_max", p.d_max);
  get("diameter_window", p.diameter_window);
  get("heterogeneity", p.heterogeneity);
  get("initial_diameter_min", p.initial_diameter_min);
  get("initial_diameter_max", p.initial_diameter_max);
  get("chemo_dose_min", p.chemo_dose_min);
  get("chemo_dose_max", p.chemo_dose_max);
  get("radio_dose_min", p.radio_dose_min);
  get("radio_dose_max", p.radio_dose_max);
  get("volume_floor", p.volume_floor);
  get("steps", p.steps);
  get("patients", p.patients);
  get("seed", p.seed);
  for (const auto& [key, _] : j.items())
    if (!to_json(TumourParams{}).contains(key))
      throw std::invalid_argument("tumour params: unknown key '" + key + "'");
  p.validate();
  return p;
}

double diameter_from_volume(double volume) {
  return std::cbrt(6.0 * volume / std::numbers::pi);
}

double volume_from_diameter(double diameter) {
  return std::numbers::pi * diameter * diameter * diameter / 6.0;
}

TumourSimulator::TumourSimulator(TumourParams params) : params_(std::move(params)) {
  params_.validate();
}

std::string TumourSimulator::entity_id(std::size_t index) const {
  return "patient-" + std::to_string(index);
}

TumourSimulator::Patient TumourSimulator::patient(std::size_t index) const {
  const auto& p = params_;
  auto rng = make_rng(p.seed, {stream_tag("tumour"), index});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Patient pt;
  const double d0 =
      p.initial_diameter_min + (p.initial_diameter_max - p.initial_diameter_min) * unit(rng);
  pt.v0 = volume_from_diameter(d0);
  const double z_rho = normal(rng);
  pt.rho = p.rho * std::max(0.2, 1.0 + p.heterogeneity * z_rho);
  pt.beta_c = p.beta_c * std::max(0.0, 1.0 + p.heterogeneity * normal(rng));
  const double radio_scale = std::max(0.0, 1.0 + p.heterogeneity * normal(rng));
  pt.alpha_r = p.alpha_r * radio_scale;
  pt.beta_r = p.beta_r * radio_scale;
  pt.marker = z_rho + 0.5 * normal(rng);

  const std::size_t n = p.steps + kRolloutSlack;
  pt.chemo_dose.resize(n);
  pt.radio_dose.resize(n);
  pt.noise.resize(n);
  pt.u_chemo.resize(n);
  pt.u_radio.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    pt.chemo_dose[s] = p.chemo_dose_min + (p.chemo_dose_max - p.chemo_dose_min) * unit(rng);
    pt.radio_dose[s] = p.radio_dose_min + (p.radio_dose_max - p.radio_dose_min) * unit(rng);
    pt.noise[s] = p.noise_std * normal(rng);
    pt.u_chemo[s] = unit(rng);
    pt.u_radio[s] = unit(rng);
  }
  return pt;
}

double TumourSimulator::step_volume(const Patient& pt, double volume, double concentration,
                                    double radio_dose, double noise) const {
  const double growth = pt.rho * std::log(params_.k_cap / volume);
  const double chemo_kill = pt.beta_c * concentration;
  const double radio_kill = pt.alpha_r * radio_dose + pt.beta_r * radio_dose * radio_dose;
  const double next = volume * (1.0 + growth - chemo_kill - radio_kill + noise);
  return next > params_.volume_floor ? next : params_.volume_floor;
}

std::pair<data::Dataset, GroundTruthTable> TumourSimulator::simulate() const {
  const auto& p = params_;
  const double decay = std::pow(0.5, 1.0 / p.chemo_half_life);
  data::Dataset ds;
  ds.dims = dims();
  GroundTruthTable table(2);

  for (std::size_t i = 0; i < p.patients; ++i) {
    const Patient pt = patient(i);
    data::Trajectory tr;
    tr.entity_id = entity_id(i);
    double volume = pt.v0;
    double residual = 0.0;
    std::vector<double> diameters;

    for (std::size_t s = 0; s < p.steps; ++s) {
      diameters.push_back(diameter_from_volume(volume));
      const std::size_t w = std::min(p.diameter_window, diameters.size());
      double mean_d = 0;
      for (std::size_t j = diameters.size() - w; j < diameters.size(); ++j)
        mean_d += diameters[j];
      mean_d /= static_cast<double>(w);

      const double p_chemo = sigmoid(p.gamma_c / p.d_max * (mean_d - p.diameter_threshold));
      const double p_radio = sigmoid(p.gamma_r / p.d_max * (mean_d - p.diameter_threshold));
      data::TimeStep st;
      st.x = {residual, pt.marker};
      st.v = {pt.chemo_dose[s], pt.radio_dose[s]};
      st.a = {static_cast<std::uint8_t>(pt.u_chemo[s] < p_chemo),
              static_cast<std::uint8_t>(pt.u_radio[s] < p_radio)};
      st.y = volume;
      tr.steps.push_back(st);
      if (s + 1 == p.steps) break;

      std::vector<double> arms(4);
      for (std::uint32_t m = 0; m < 4; ++m)
        arms[m] = step_volume(pt, volume, residual + ((m & 1) ? pt.chemo_dose[s] : 0.0),
                              (m & 2) ? pt.radio_dose[s] : 0.0, pt.noise[s]);
      const std::uint32_t factual = data::bitmask(st.a);
      const double next = arms[factual];
      if (next >= 1.05 * p.k_cap) {
        tr.status = "terminal";
        break;
      }
      table.set(tr.entity_id, s, std::move(arms));
      if (next <= p.volume_floor) tr.status = "recovered";
      residual = (residual + (st.a[0] ? pt.chemo_dose[s] : 0.0)) * decay;
      volume = next;
    }
    ds.trajectories.push_back(std::move(tr));
  }
  return {std::move(ds), std::move(table)};
}

std::vector<double> TumourSimulator::rollout(std::size_t entity, std::size_t s,
                                             std::span<const PlanStep> plan) const {
  const auto& p = params_;
  if (entity >= p.patients) throw std::out_of_range("tumour rollout: unknown patient");
  if (s >= p.steps) throw std::out_of_range("tumour rollout: step beyond horizon");
  if (s + plan.size() > p.steps + kRolloutSlack)
    throw std::out_of_range("tumour rollout: plan too long");
  const Patient pt = patient(entity);
  const double decay = std::pow(0.5, 1.0 / p.chemo_half_life);

  // Replay the factual path up to s.
  double volume = pt.v0;
  double residual = 0.0;
  std::vector<double> diameters;
  for (std::size_t j = 0; j < s; ++j) {
    diameters.push_back(diameter_from_volume(volume));
    const std::size_t w = std::min(p.diameter_window, diameters.size());
    double mean_d = 0;
    for (std::size_t q = diameters.size() - w; q < diameters.size(); ++q) mean_d += diameters[q];
    mean_d /= static_cast<double>(w);
    const bool chemo =
        pt.u_chemo[j] < sigmoid(p.gamma_c / p.d_max * (mean_d - p.diameter_threshold));
    const bool radio =
        pt.u_radio[j] < sigmoid(p.gamma_r / p.d_max * (mean_d - p.diameter_threshold));
    const double conc = residual + (chemo ? pt.chemo_dose[j] : 0.0);
    volume = step_volume(pt, volume, conc, radio ? pt.radio_dose[j] : 0.0, pt.noise[j]);
    residual = conc * decay;
  }

  std::vector<double> out;
  out.reserve(plan.size());
  for (std::size_t j = 0; j < plan.size(); ++j) {
    const auto& ps = plan[j];
    if (ps.a.size() != 2 || ps.v.size() != 2)
      throw std::invalid_argument("tumour rollout: plan step needs 2 bits and 2 features");
    const double conc = residual + (ps.a[0] ? ps.v[0] : 0.0);
    volume = step_volume(pt, volume, conc, ps.a[1] ? ps.v[1] : 0.0, pt.noise[s + j]);
    residual = conc * decay;
    out.push_back(volume);
  }
  return out;
}

std::pair<data::Dataset, GroundTruthTable> simulate_tumour(const TumourParams& params) {
  return TumourSimulator(params).simulate();
}

}  // namespace tcf::sim
