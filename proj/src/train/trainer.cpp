#include "tcf/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcf/cf/corruption.hpp"
#include "tcf/simd/kernels.hpp"
#include "tcf/util/log.hpp"
#include "tcf/util/seed.hpp"

namespace tcf::train {
namespace {

constexpr std::size_t kEvalChunk = 128;

double target_count(const Batch& b) {
  double n = b.count(b.has_next);
  for (const auto& h : b.decoder)
    for (double v : h.has_target.values()) n += v;
  return n;
}

}  // namespace

void TrainConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("train config: ") + what);
  };
  need(epochs >= 1, "epochs must be >= 1");
  need(batch_size >= 1, "batch_size must be >= 1");
  need(adam.learning_rate > 0, "learning_rate must be > 0");
  need(adam.beta1 >= 0 && adam.beta1 < 1, "beta1 must lie in [0, 1)");
  need(adam.beta2 >= 0 && adam.beta2 < 1, "beta2 must lie in [0, 1)");
  need(adam.epsilon > 0, "adam_epsilon must be > 0");
  need(adam.clip_norm >= 0, "clip_norm must be >= 0");
  need(corruption_positions >= 1, "corruption_positions must be >= 1");
  lambda1.validate();
  lambda2.validate();
  const double s = split.train + split.valid + split.test;
  need(split.train > 0 && split.valid >= 0 && split.test >= 0 && std::fabs(s - 1.0) < 1e-9,
       "split fractions must be non-negative, train > 0, and sum to 1");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.adam.learning_rate},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"adam_epsilon", c.adam.epsilon},
          {"clip_norm", c.adam.clip_norm},
          {"lambda1_init", c.lambda1.init},
          {"lambda1_rate", c.lambda1.rate},
          {"lambda1_cap", c.lambda1.cap},
          {"lambda2_init", c.lambda2.init},
          {"lambda2_rate", c.lambda2.rate},
          {"lambda2_cap", c.lambda2.cap},
          {"counterfactual", c.counterfactual},
          {"invert_ratio", c.invert_ratio},
          {"corruption_positions", c.corruption_positions},
          {"keep_best", c.keep_best},
          {"seed", c.seed},
          {"deterministic", c.deterministic},
          {"split_train", c.split.train},
          {"split_valid", c.split.valid},
          {"split_test", c.split.test}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  const auto known = to_json(c);
  if (!j.is_object()) throw std::invalid_argument("train config: expected an object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw std::invalid_argument("train config: unknown key '" + key + "'");
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("epochs", c.epochs);
  get("batch_size", c.batch_size);
  get("learning_rate", c.adam.learning_rate);
  get("beta1", c.adam.beta1);
  get("beta2", c.adam.beta2);
  get("adam_epsilon", c.adam.epsilon);
  get("clip_norm", c.adam.clip_norm);
  get("lambda1_init", c.lambda1.init);
  get("lambda1_rate", c.lambda1.rate);
  get("lambda1_cap", c.lambda1.cap);
  get("lambda2_init", c.lambda2.init);
  get("lambda2_rate", c.lambda2.rate);
  get("lambda2_cap", c.lambda2.cap);
  get("counterfactual", c.counterfactual);
  get("invert_ratio", c.invert_ratio);
  get("corruption_positions", c.corruption_positions);
  get("keep_best", c.keep_best);
  get("seed", c.seed);
  get("deterministic", c.deterministic);
  get("split_train", c.split.train);
  get("split_valid", c.split.valid);
  get("split_test", c.split.test);
  return c;
}

nlohmann::json to_json(const EpochRecord& r) {
  nlohmann::json j = {{"epoch", r.epoch},        {"L_y", r.loss.l_y},
                      {"L_a", r.loss.l_a},       {"L_d", r.loss.l_d},
                      {"total", r.loss.total},   {"val_rmse", nullptr},
                      {"lambda1", r.lambda1},    {"lambda2", r.lambda2}};
  if (r.val_rmse) j["val_rmse"] = *r.val_rmse;
  return j;
}

TrainingError::TrainingError(const std::string& what, std::size_t e, std::size_t b)
    : std::runtime_error("epoch " + std::to_string(e) + ", batch " + std::to_string(b) + ": " +
                         what),
      epoch(e),
      batch(b) {}

double validation_rmse(net::Network& net, const data::Dataset& norm, double y_span) {
  double sse = 0.0, n = 0.0;
  for (std::size_t i = 0; i < norm.size(); i += kEvalChunk) {
    std::vector<const data::Trajectory*> rows;
    for (std::size_t j = i; j < std::min(norm.size(), i + kEvalChunk); ++j)
      rows.push_back(&norm.trajectories[j]);
    Batch b = make_batch(rows, {}, net.config());
    const double cnt = target_count(b);
    sse += outcome_loss(net, b) * cnt;
    n += cnt;
  }
  if (n == 0) return 0.0;
  return std::sqrt(sse / n) * y_span;
}

TrainResult train(net::Network& net, const data::Dataset& train_norm,
                  const data::Dataset& valid_norm, const TrainConfig& cfg, double y_span,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (train_norm.empty()) throw std::invalid_argument("train: empty training split");
  if (cfg.deterministic) simd::set_isa(simd::Isa::Scalar);
  init_logging();

  auto& params = net.params();
  Adam adam(params, cfg.adam);
  cf::CorruptionOptions copts;
  copts.positions = cfg.corruption_positions;
  const std::size_t n = train_norm.size();

  TrainResult result;
  std::vector<ad::Tensor> best;
  double best_score = INFINITY;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Lambdas lam = lambda_schedule(cfg.lambda1, cfg.lambda2, epoch);
    ObjectiveOptions oo;
    oo.lambda1 = lam.lambda1;
    oo.lambda2 = lam.lambda2;
    oo.invert_ratio = cfg.invert_ratio;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto shuffle_rng = make_rng(cfg.seed, {stream_tag("shuffle"), epoch});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    std::vector<data::Trajectory> corrupted;
    if (cfg.counterfactual) {
      corrupted.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto rng = make_rng(cfg.seed, {stream_tag("corrupt"), epoch, i});
        corrupted.push_back(
            cf::corrupt_trajectory(train_norm.trajectories[i], train_norm.dims, rng, copts)
                .trajectory);
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lambda1 = lam.lambda1;
    rec.lambda2 = lam.lambda2;
    double weight = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_no) {
      std::vector<const data::Trajectory*> fac, cor;
      for (std::size_t j = start; j < std::min(n, start + cfg.batch_size); ++j) {
        fac.push_back(&train_norm.trajectories[order[j]]);
        if (cfg.counterfactual) cor.push_back(&corrupted[order[j]]);
      }
      Batch b = make_batch(fac, cor, net.config());
      ObjectiveTerms terms;
      try {
        ad::Tape tape;
        terms = build_objective(tape, net, b, oo);
        if (!std::isfinite(terms.j.value().item()))
          throw TrainingError("non-finite objective", epoch, batch_no);
        params.zero_grad();
        tape.backward(terms.j);
      } catch (const ad::NonFiniteError& e) {
        throw TrainingError(e.what(), epoch, batch_no);
      }
      const double g = adam.step(params);
      if (!std::isfinite(g)) throw TrainingError("non-finite gradient", epoch, batch_no);
      const double w = static_cast<double>(fac.size());
      rec.loss.l_y += w * terms.breakdown.l_y;
      rec.loss.l_a += w * terms.breakdown.l_a;
      rec.loss.l_d += w * terms.breakdown.l_d;
      weight += w;
    }
    rec.loss.l_y /= weight;
    rec.loss.l_a /= weight;
    rec.loss.l_d /= weight;
    rec.loss.total = rec.loss.l_y - rec.lambda1 * rec.loss.l_a + rec.lambda2 * rec.loss.l_d;

    double score;
    if (!valid_norm.empty()) {
      rec.val_rmse = validation_rmse(net, valid_norm, y_span);
      score = *rec.val_rmse;
    } else {
      score = rec.loss.l_y;
    }
    if (!std::isfinite(score)) throw TrainingError("non-finite validation score", epoch, batch_no);
    if (score < best_score) {
      best_score = score;
      result.best_epoch = epoch;
      if (cfg.keep_best) {
        best.clear();
        for (const auto& p : params) best.push_back(p.value);
      }
    }
    spdlog::info("epoch {:>3}  L_y {:.5f}  L_a {:.5f}  L_d {:.5f}  val_rmse {}", epoch,
                 rec.loss.l_y, rec.loss.l_a, rec.loss.l_d,
                 rec.val_rmse ? std::to_string(*rec.val_rmse) : std::string("-"));
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  if (cfg.keep_best && !best.empty())
    for (std::size_t i = 0; i < params.size(); ++i) params[i].value = best[i];
  return result;
}

}  // namespace tcf::train
