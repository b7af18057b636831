#include "tcf/sim/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "tcf/util/seed.hpp"

namespace tcf::sim {
namespace {

constexpr std::size_t kRolloutSlack = 64;

}  // namespace

std::size_t SyntheticConfig::pair_index(std::size_t i, std::size_t j, std::size_t k) {
  if (!(i < j && j < k)) throw std::out_of_range("interaction pair index");
  // Pairs before row i: sum_{r<i} (k - 1 - r).
  return i * (2 * k - i - 1) / 2 + (j - i - 1);
}

void SyntheticConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("synthetic config: " + what);
  };
  need(k >= 1, "k must be >= 1");
  need(k <= 8, "k must be <= 8 (got " + std::to_string(k) + ")");
  need(w.size() == k, "w must have k entries");
  need(u.size() == pair_count(k), "u must have k(k-1)/2 entries");
  need(std::fabs(c) < 1.0, "|c| must be < 1");
  need(d_x >= 1, "d_x must be >= 1");
  need(d_v >= 1, "d_v must be >= 1");
  need(bias >= 0, "bias must be >= 0");
  need(noise_std >= 0, "noise_std must be >= 0");
  need(v_max >= v_min, "v range invalid");
  need(steps >= 2, "steps must be >= 2");
  need(entities >= 1, "entities must be >= 1");
}

nlohmann::json to_json(const SyntheticConfig& c) {
  return {{"k", c.k},         {"w", c.w},
          {"u", c.u},         {"c", c.c},
          {"d_x", c.d_x},     {"d_v", c.d_v},
          {"bias", c.bias},   {"noise_std", c.noise_std},
          {"constant_v", c.constant_v},
          {"v_min", c.v_min}, {"v_max", c.v_max},
          {"steps", c.steps}, {"entities", c.entities},
          {"seed", c.seed}};
}

SyntheticConfig synthetic_config_from_json(const nlohmann::json& j) {
  SyntheticConfig c;
  const auto known = to_json(c);
  for (const auto& [key, _] : j.items())
    if (!known.contains(key))
      throw std::invalid_argument("synthetic config: unknown key '" + key + "'");
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("k", c.k);
  get("w", c.w);
  get("u", c.u);
  get("c", c.c);
  get("d_x", c.d_x);
  get("d_v", c.d_v);
  get("bias", c.bias);
  get("noise_std", c.noise_std);
  get("constant_v", c.constant_v);
  get("v_min", c.v_min);
  get("v_max", c.v_max);
  get("steps", c.steps);
  get("entities", c.entities);
  get("seed", c.seed);
  // Convenience: k changed but weights left at defaults.
  if (j.contains("k") && !j.contains("w")) c.w.assign(c.k, 0.5);
  if (j.contains("k") && !j.contains("u")) c.u.assign(SyntheticConfig::pair_count(c.k), 0.0);
  c.validate();
  return c;
}

SyntheticSimulator::SyntheticSimulator(SyntheticConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::string SyntheticSimulator::entity_id(std::size_t index) const {
  return "unit-" + std::to_string(index);
}

SyntheticSimulator::Draws SyntheticSimulator::draws(std::size_t index) const {
  const auto& c = config_;
  auto rng = make_rng(c.seed, {stream_tag("synthetic"), index});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Draws d;
  for (std::size_t i = 0; i < c.d_x; ++i) d.x0.push_back(normal(rng));
  d.y0 = 0.5 * normal(rng);
  const std::size_t n = c.steps + kRolloutSlack;
  d.v.resize(n);
  d.noise.resize(n);
  d.eta.resize(n);
  d.u.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    d.v[s].resize(c.d_v * c.k);
    for (auto& f : d.v[s]) f = c.constant_v ? 1.0 : c.v_min + (c.v_max - c.v_min) * unit(rng);
    d.noise[s] = c.noise_std * normal(rng);
    d.eta[s].resize(c.d_x);
    for (auto& e : d.eta[s]) e = normal(rng);
    d.u[s].resize(c.k);
    for (auto& u : d.u[s]) u = unit(rng);
  }
  return d;
}

double SyntheticSimulator::mean_next(double y, const std::vector<double>& x,
                                     const std::vector<double>& v,
                                     const std::vector<std::uint8_t>& a) const {
  const auto& c = config_;
  double g = 0;
  for (std::size_t i = 0; i < c.d_x; ++i)
    g += (i % 2 == 0 ? 0.5 * std::sin(x[i]) : 0.3 * std::tanh(x[i]));
  double effects = 0;
  for (std::size_t k = 0; k < c.k; ++k) {
    if (!a[k]) continue;
    double vbar = 0;
    for (std::size_t d = 0; d < c.d_v; ++d) vbar += v[d * c.k + k];
    effects += c.w[k] * vbar / static_cast<double>(c.d_v);
  }
  for (std::size_t i = 0; i < c.k; ++i)
    for (std::size_t j = i + 1; j < c.k; ++j)
      if (a[i] && a[j]) effects += c.interaction(i, j);
  return c.c * y + g + effects;
}

std::vector<double> SyntheticSimulator::next_x(const std::vector<double>& x,
                                               const std::vector<std::uint8_t>& a,
                                               const std::vector<double>& eta) const {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = 0.7 * x[i] - 0.3 * a[i % config_.k] + 0.3 * eta[i];
  return out;
}

std::vector<std::uint8_t> SyntheticSimulator::assign(const std::vector<double>& x, double y,
                                                     const std::vector<double>& u) const {
  const auto& c = config_;
  std::vector<std::uint8_t> a(c.k);
  for (std::size_t k = 0; k < c.k; ++k) {
    const double z = c.bias * (x[k % c.d_x] + 0.5 * y);
    a[k] = u[k] < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
  }
  return a;
}

std::pair<data::Dataset, GroundTruthTable> SyntheticSimulator::simulate() const {
  const auto& c = config_;
  data::Dataset ds;
  ds.dims = dims();
  GroundTruthTable table(c.k);
  const std::uint32_t arms = std::uint32_t{1} << c.k;

  for (std::size_t i = 0; i < c.entities; ++i) {
    const Draws d = draws(i);
    data::Trajectory tr;
    tr.entity_id = entity_id(i);
    std::vector<double> x = d.x0;
    double y = d.y0;
    for (std::size_t s = 0; s < c.steps; ++s) {
      data::TimeStep st;
      st.x = x;
      st.v = d.v[s];
      st.a = assign(x, y, d.u[s]);
      st.y = y;
      tr.steps.push_back(st);
      if (s + 1 == c.steps) break;
      std::vector<double> row(arms);
      for (std::uint32_t m = 0; m < arms; ++m)
        row[m] = mean_next(y, x, st.v, data::bits_from_mask(m, c.k)) + d.noise[s];
      y = row[data::bitmask(st.a)];
      table.set(tr.entity_id, s, std::move(row));
      x = next_x(x, st.a, d.eta[s]);
    }
    ds.trajectories.push_back(std::move(tr));
  }
  return {std::move(ds), std::move(table)};
}

std::vector<double> SyntheticSimulator::rollout(std::size_t entity, std::size_t s,
                                                std::span<const PlanStep> plan) const {
  const auto& c = config_;
  if (entity >= c.entities) throw std::out_of_range("synthetic rollout: unknown entity");
  if (s >= c.steps) throw std::out_of_range("synthetic rollout: step beyond horizon");
  if (s + plan.size() > c.steps + kRolloutSlack)
    throw std::out_of_range("synthetic rollout: plan too long");
  const Draws d = draws(entity);
  std::vector<double> x = d.x0;
  double y = d.y0;
  for (std::size_t j = 0; j < s; ++j) {
    const auto a = assign(x, y, d.u[j]);
    y = mean_next(y, x, d.v[j], a) + d.noise[j];
    x = next_x(x, a, d.eta[j]);
  }
  std::vector<double> out;
  for (std::size_t j = 0; j < plan.size(); ++j) {
    const auto& ps = plan[j];
    if (ps.a.size() != c.k || ps.v.size() != c.d_v * c.k)
      throw std::invalid_argument("synthetic rollout: plan step has wrong size");
    y = mean_next(y, x, ps.v, ps.a) + d.noise[s + j];
    x = next_x(x, ps.a, d.eta[s + j]);
    out.push_back(y);
  }
  return out;
}

std::pair<data::Dataset, GroundTruthTable> simulate_synthetic(const SyntheticConfig& config) {
  return SyntheticSimulator(config).simulate();
}

}  // namespace tcf::sim
