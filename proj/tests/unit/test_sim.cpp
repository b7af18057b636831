#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tcf/sim/ground_truth.hpp"
#include "tcf/sim/sim_config.hpp"
#include "tcf/sim/synthetic.hpp"
#include "tcf/sim/tumour.hpp"

using namespace tcf;
using namespace tcf::sim;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tcf_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Pearson correlation between tumour diameter and the chemo indicator.
double diameter_treatment_correlation(double gamma) {
  TumourParams p;
  p.gamma_c = p.gamma_r = gamma;
  p.patients = 10000;
  p.seed = 17;
  auto [ds, table] = simulate_tumour(p);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  double n = 0;
  for (const auto& tr : ds.trajectories)
    for (const auto& st : tr.steps) {
      const double d = diameter_from_volume(st.y);
      const double a = st.a[0];
      sx += d;
      sy += a;
      sxx += d * d;
      syy += a * a;
      sxy += d * a;
      n += 1;
    }
  const double cov = sxy / n - sx / n * sy / n;
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  return cov / std::sqrt(vx * vy);
}

}  // namespace

TEST_CASE("tumour: zero gamma gives coin-flip assignment") {
  TumourParams p;
  p.patients = 2000;
  auto [ds, table] = simulate_tumour(p);
  double on = 0, n = 0;
  for (const auto& tr : ds.trajectories)
    for (const auto& st : tr.steps) {
      on += st.a[0] + st.a[1];
      n += 2;
    }
  CHECK(std::fabs(on / n - 0.5) < 0.01);
  CHECK(std::fabs(diameter_treatment_correlation(0.0)) < 0.02);
}

TEST_CASE("tumour: untreated noiseless path grows monotonically toward capacity") {
  TumourParams p;
  p.noise_std = 0.0;
  p.patients = 20;
  TumourSimulator sim(p);
  std::vector<PlanStep> plan(60, PlanStep{{0, 0}, {0.0, 0.0}});
  for (std::size_t i = 0; i < p.patients; ++i) {
    auto path = sim.rollout(i, 0, plan);
    double prev = sim.patient(i).v0;
    for (double v : path) {
      CHECK(v > prev);
      CHECK(v < p.k_cap);
      prev = v;
    }
  }
}

TEST_CASE("tumour: same seed gives identical bytes") {
  TumourParams p;
  p.patients = 50;
  p.gamma_c = p.gamma_r = 5;
  p.seed = 3;
  const auto a = temp_path("tumour_a.jsonl"), b = temp_path("tumour_b.jsonl");
  auto [d1, t1] = simulate_tumour(p);
  auto [d2, t2] = simulate_tumour(p);
  data::save_dataset(d1, a);
  data::save_dataset(d2, b);
  CHECK(slurp(a) == slurp(b));
  t1.save(a);
  t2.save(b);
  CHECK(slurp(a) == slurp(b));
  p.seed = 4;
  auto [d3, t3] = simulate_tumour(p);
  CHECK_FALSE(d3 == d1);
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("tumour: emitted volumes stay in range and statuses are consistent") {
  TumourParams p;
  p.patients = 1000;
  p.rho = 0.3;  // push some patients to terminal
  p.noise_std = 0.05;
  p.beta_c = p.alpha_r = p.beta_r = 0.0;
  auto [ds, table] = simulate_tumour(p);
  std::size_t terminal = 0;
  for (const auto& tr : ds.trajectories) {
    for (const auto& st : tr.steps) {
      CHECK(st.y >= p.volume_floor);
      CHECK(st.y <= 1.05 * p.k_cap);
    }
    if (tr.status == "terminal") {
      ++terminal;
      CHECK(tr.length() < p.steps);
    }
  }
  CHECK(terminal > 0);
}

TEST_CASE("tumour: selection bias is monotone in gamma") {
  double prev = -1.0;
  for (double g : {0.0, 2.0, 5.0, 10.0}) {
    const double c = diameter_treatment_correlation(g);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("tumour: rollout reproduces the ground-truth table") {
  TumourParams p;
  p.patients = 30;
  p.gamma_c = p.gamma_r = 5;
  TumourSimulator sim(p);
  auto [ds, table] = sim.simulate();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& tr = ds.trajectories[i];
    for (std::size_t s = 0; s + 1 < tr.length(); ++s)
      for (std::uint32_t m = 0; m < 4; ++m) {
        PlanStep ps{data::bits_from_mask(m, 2), tr.steps[s].v};
        auto out = sim.rollout(i, s, std::span<const PlanStep>(&ps, 1));
        CHECK(out[0] == table.outcome(tr.entity_id, s, m));
      }
  }
  // Factual rollout over several steps follows the observed path.
  const auto& tr = ds.trajectories[0];
  std::vector<PlanStep> plan;
  for (std::size_t s = 2; s < 6; ++s) plan.push_back({tr.steps[s].a, tr.steps[s].v});
  auto out = sim.rollout(0, 2, plan);
  for (std::size_t j = 0; j < out.size(); ++j) CHECK(out[j] == tr.steps[3 + j].y);
}

TEST_CASE("tumour: invalid params are rejected") {
  TumourParams p;
  p.rho = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.gamma_c = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.beta_c = -0.1;
  CHECK_THROWS_AS(TumourSimulator{p}, std::invalid_argument);
}

TEST_CASE("synthetic: additive case has zero interactions everywhere") {
  SyntheticConfig c;
  c.entities = 50;
  c.u = {0.0};
  auto [ds, table] = simulate_synthetic(c);
  table.for_each([&](const std::string& id, std::size_t t, const std::vector<double>&) {
    CHECK(std::fabs(ground_truth_interaction(table, id, t, 3)) < 1e-12);
  });
}

TEST_CASE("synthetic: injected interaction and main effects are recovered from the table") {
  SyntheticConfig c;
  c.entities = 40;
  c.u = {0.5};
  c.constant_v = true;
  auto [ds, table] = simulate_synthetic(c);
  table.for_each([&](const std::string& id, std::size_t t, const std::vector<double>&) {
    CHECK(ground_truth_interaction(table, id, t, 3) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ground_truth_interaction(table, id, t, 1) == 0.0);
    CHECK(ground_truth_interaction(table, id, t, 2) == 0.0);
    CHECK(ground_truth_interaction(table, id, t, 0) == 0.0);
  });

  c.constant_v = false;
  auto [ds2, table2] = simulate_synthetic(c);
  for (const auto& tr : ds2.trajectories)
    for (std::size_t s = 0; s + 1 < tr.length(); ++s)
      for (std::size_t k = 0; k < 2; ++k)
        CHECK(table2.cate(tr.entity_id, s, k) ==
              doctest::Approx(c.w[k] * tr.steps[s].v[k]).epsilon(1e-12));
}

TEST_CASE("synthetic: the table satisfies the interaction identity for K=3") {
  SyntheticConfig c;
  c.k = 3;
  c.w = {0.5, -0.4, 0.3};
  c.u = {0.2, -0.3, 0.4};  // (0,1) (0,2) (1,2)
  c.entities = 20;
  c.constant_v = true;
  auto [ds, table] = simulate_synthetic(c);
  table.for_each([&](const std::string& id, std::size_t t, const std::vector<double>& row) {
    for (std::uint32_t m = 0; m < 8; ++m) {
      double expect = 0;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
          if ((m >> i & 1) && (m >> j & 1)) expect += c.interaction(i, j);
      CHECK(ground_truth_interaction(table, id, t, m) == doctest::Approx(expect).epsilon(1e-12));
    }
    (void)row;
  });
}

TEST_CASE("synthetic: validation") {
  SyntheticConfig c;
  c.k = 9;
  c.w.assign(9, 0.1);
  c.u.assign(36, 0.0);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.c = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(SyntheticConfig::pair_index(1, 2, 3) == 2);
  CHECK(SyntheticConfig::pair_index(0, 2, 3) == 1);
}

TEST_CASE("synthetic: rollout reproduces table and factual path") {
  SyntheticConfig c;
  c.entities = 10;
  c.u = {-0.5};
  SyntheticSimulator sim(c);
  auto [ds, table] = sim.simulate();
  const auto& tr = ds.trajectories[3];
  for (std::size_t s = 0; s + 1 < tr.length(); ++s)
    for (std::uint32_t m = 0; m < 4; ++m) {
      PlanStep ps{data::bits_from_mask(m, 2), tr.steps[s].v};
      CHECK(sim.rollout(3, s, std::span<const PlanStep>(&ps, 1))[0] ==
            table.outcome(tr.entity_id, s, m));
    }
  std::vector<PlanStep> plan;
  for (std::size_t s = 5; s < 10; ++s) plan.push_back({tr.steps[s].a, tr.steps[s].v});
  auto out = sim.rollout(3, 5, plan);
  for (std::size_t j = 0; j < out.size(); ++j) CHECK(out[j] == tr.steps[6 + j].y);
}

TEST_CASE("ground truth: missing entries rejected and files round trip") {
  SyntheticConfig c;
  c.entities = 5;
  auto [ds, table] = simulate_synthetic(c);
  CHECK_THROWS_AS(ground_truth_interaction(table, "nope", 0, 1), std::out_of_range);
  CHECK_THROWS_AS(table.outcome("unit-0", 1000, 0), std::out_of_range);
  const auto path = temp_path("truth.jsonl");
  table.save(path);
  auto back = GroundTruthTable::load(path);
  CHECK(back.size() == table.size());
  CHECK(back.k() == 2);
  CHECK(back.outcome("unit-2", 4, 3) == table.outcome("unit-2", 4, 3));
  std::remove(path.c_str());
}

TEST_CASE("sim spec: JSON round trip and sidecar paths") {
  TumourParams p;
  p.gamma_c = 2.5;
  SimSpec spec = p;
  auto back = sim_spec_from_json(to_json(spec));
  REQUIRE(std::holds_alternative<TumourParams>(back));
  CHECK(std::get<TumourParams>(back).gamma_c == 2.5);
  SyntheticConfig c;
  c.u = {0.5};
  back = sim_spec_from_json(to_json(SimSpec{c}));
  REQUIRE(std::holds_alternative<SyntheticConfig>(back));
  CHECK(std::get<SyntheticConfig>(back).u == std::vector<double>{0.5});
  CHECK_THROWS_AS(sim_spec_from_json({{"model", "weather"}}), std::invalid_argument);
  CHECK_THROWS_AS(sim_spec_from_json({{"model", "tumour"}, {"params", {{"rhoo", 1}}}}),
                  std::invalid_argument);
  CHECK(truth_path("/a/d.jsonl") == "/a/d.truth.jsonl");
  CHECK(sim_spec_path("/a/d.jsonl") == "/a/d.sim.json");
}
