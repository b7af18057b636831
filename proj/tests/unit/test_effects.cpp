#include <doctest.h>

#include <cmath>

#include "tcf/data/history.hpp"
#include "tcf/effects/estimators.hpp"
#include "tcf/effects/metrics.hpp"
#include "tcf/effects/recommend.hpp"
#include "tcf/sim/sim_config.hpp"
#include "tcf/sim/synthetic.hpp"

using namespace tcf;
using namespace tcf::effects;

namespace {

struct Fixture {
  sim::SyntheticConfig sc;
  data::Dataset ds;
  data::NormStats stats;
  net::ModelConfig cfg;
  std::unique_ptr<net::Network> net;

  Fixture() {
    sc.entities = 5;
    sc.steps = 12;
    sc.seed = 7;
    ds = sim::simulate_synthetic(sc).first;
    stats = data::fit_stats(ds);
    cfg.d_x = ds.dims.d_x;
    cfg.d_v = ds.dims.d_v;
    cfg.k = ds.dims.k;
    cfg.d_r = 8;
    cfg.d_z = 3;
    cfg.head_hidden = 6;
    cfg.tau_max = 3;
    net = std::make_unique<net::Network>(cfg, 21);
  }
  net::Forecaster fc() { return net::Forecaster(*net, stats); }
  data::History history(std::size_t i, std::size_t t) const {
    return data::build_history(ds.trajectories[i], ds.dims, t);
  }
};

}  // namespace

TEST_CASE("interaction identities are exact") {
  Fixture f;
  auto fc = f.fc();
  auto h = f.history(1, 6);
  for (std::size_t k = 0; k < f.cfg.k; ++k) {
    std::vector<std::uint8_t> e(f.cfg.k, 0);
    e[k] = 1;
    CHECK(estimate_interaction(fc, h, e, 1).value == 0.0);
    CHECK(estimate_interaction(fc, h, e, 2).value == 0.0);
  }
  CHECK(estimate_interaction(fc, h, std::vector<std::uint8_t>(f.cfg.k, 0), 1).value == 0.0);
  auto both = estimate_interaction(fc, h, std::vector<std::uint8_t>(f.cfg.k, 1), 1);
  CHECK(std::isfinite(both.value));
}

TEST_CASE("interaction forms on a hand outcome set") {
  net::OutcomeSet os;
  os.a = {1, 0};
  os.none = 1;
  os.single = {2, 4};
  os.requested = 7;
  CHECK(interaction_from_outcomes(os) == doctest::Approx(5.0));
  CHECK(interaction_from_outcomes(os, InteractionForm::Literal) == doctest::Approx(2.0));
  os.a = {1, 1};
  os.requested = 9;
  CHECK(interaction_from_outcomes(os) == doctest::Approx(4.0));
  CHECK(interaction_from_outcomes(os, InteractionForm::Literal) == doctest::Approx(4.0));
}

TEST_CASE("contrasts: identical arms vanish, swapped arms negate") {
  Fixture f;
  auto fc = f.fc();
  auto h = f.history(0, 5);
  auto p1 = last_step_plan(f.cfg.k, 2, {1, 0});
  auto p0 = last_step_plan(f.cfg.k, 2, {0, 0});
  CHECK(contrast(fc, h, p1, p1) == 0.0);
  CHECK(contrast(fc, h, p1, p0) == -contrast(fc, h, p0, p1));

  auto all = estimate_cates(fc, h, 2, "e");
  REQUIRE(all.size() == f.cfg.k);
  for (std::size_t k = 0; k < f.cfg.k; ++k) {
    auto one = estimate_cate(fc, h, k, 2, "e");
    CHECK(one.value == doctest::Approx(all[k].value).epsilon(1e-12));
    CHECK(one.t == 5);
  }
  CHECK_THROWS_AS(estimate_cate(fc, h, f.cfg.k, 1), std::out_of_range);
  CHECK_THROWS_AS(estimate_cate(fc, h, 0, 4), std::out_of_range);
  CHECK_THROWS_AS(estimate_cate(fc, h, 0, 0), std::out_of_range);
}

TEST_CASE("candidate set and tie-break") {
  auto cs = default_candidates(2, 3);
  CHECK(cs.size() == 10);
  CHECK(cs.front().encoding() == "00|00|00");
  CHECK(make_candidate({1, 0}, 2, 3).encoding() == "00|10|00");
  CHECK(default_candidates(3, 2).size() == 15);

  std::vector<double> scores(cs.size(), 1.0);
  auto order = rank_scores(scores, cs, Goal::Minimize);
  for (std::size_t i = 1; i < order.size(); ++i)
    CHECK(cs[order[i - 1]].encoding() < cs[order[i]].encoding());

  scores[4] = 0.5;
  CHECK(rank_scores(scores, cs, Goal::Minimize).front() == 4);
  CHECK(rank_scores(scores, cs, Goal::Maximize).back() == 4);
  CHECK(goal_from_string("maximize") == Goal::Maximize);
  CHECK_THROWS(goal_from_string("sideways"));
}

TEST_CASE("recommend ranks the forecast and validates the horizon") {
  Fixture f;
  auto fc = f.fc();
  auto h = f.history(2, 7);
  auto cs = default_candidates(f.cfg.k, 3);
  auto ranked = recommend(fc, h, 3, cs, Goal::Maximize);
  REQUIRE(ranked.size() == cs.size());
  for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].score >= ranked[i].score);
  auto direct = fc.forecast(h, ranked.front().candidate.plan);
  CHECK(direct.back() == doctest::Approx(ranked.front().score).epsilon(1e-12));
  CHECK_THROWS_AS(recommend(fc, h, 4, default_candidates(f.cfg.k, 4), Goal::Maximize),
                  std::out_of_range);
  CHECK_THROWS_AS(recommend(fc, h, 3, {}, Goal::Maximize), std::invalid_argument);
}

TEST_CASE("error percentages") {
  auto e = error_stats({0.0}, {2.0}, 4.0, 1);
  CHECK(e.rmse_pct == doctest::Approx(50.0));
  CHECK(e.mae_pct == doctest::Approx(50.0));
  auto e2 = error_stats({0.0, 0.0}, {1.0, 3.0}, 10.0);
  CHECK(e2.rmse_pct == doctest::Approx(100.0 * std::sqrt(5.0) / 10.0));
  CHECK(e2.mae_pct == doctest::Approx(20.0));
  CHECK_THROWS(error_stats({1.0}, {1.0}, 0.0));
}

TEST_CASE("evaluation report") {
  Fixture f;
  auto fc = f.fc();
  auto oracle = sim::make_oracle(sim::SimSpec{f.sc});
  EvalOptions opts;
  opts.tau = 2;
  opts.stride = 3;
  opts.goal = Goal::Maximize;
  std::vector<nlohmann::json> dump;
  auto rep = evaluate(fc, f.ds, oracle.get(), opts, &dump);
  CHECK(rep.has_ground_truth);
  CHECK(rep.factual.size() == 2);
  CHECK(rep.counterfactual.size() == 2);
  REQUIRE(rep.tr_acc.has_value());
  CHECK(*rep.trt_acc <= *rep.tr_acc);
  CHECK(rep.decisions == f.sc.entities * 4);
  CHECK(dump.size() == rep.bases);
  CHECK(rep.counterfactual[0].n == rep.decisions * default_candidates(f.cfg.k, 2).size());
  auto j = to_json(rep);
  CHECK(j["schema_version"] == 1);
  CHECK(to_table(rep).find("counterfactual") != std::string::npos);

  auto fact = evaluate(fc, f.ds, nullptr, opts);
  CHECK_FALSE(fact.has_ground_truth);
  CHECK(fact.counterfactual.empty());
  CHECK_FALSE(fact.tr_acc.has_value());
  CHECK(fact.factual[0].rmse_pct == doctest::Approx(rep.factual[0].rmse_pct));

  opts.tau = 4;
  CHECK_THROWS_AS(evaluate(fc, f.ds, nullptr, opts), std::out_of_range);
}
