#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "tcf/data/dataset.hpp"
#include "tcf/data/split.hpp"
#include "tcf/net/network.hpp"
#include "tcf/train/adam.hpp"
#include "tcf/train/objective.hpp"
#include "tcf/train/schedule.hpp"

namespace tcf::train {

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t batch_size = 32;
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8, 5.0};
  LambdaSchedule lambda1{0.1, 0.05, 1.0};
  LambdaSchedule lambda2{0.1, 0.05, 1.0};
  // Corrupted stream and contrastive term.  Off together with zero lambdas
  // gives the plain encoder-decoder.
  bool counterfactual = true;
  bool invert_ratio = true;
  std::size_t corruption_positions = 1;
  // Restore the parameters of the epoch with the lowest validation RMSE.
  bool keep_best = true;
  std::uint64_t seed = 0;
  bool deterministic = false;
  data::SplitFractions split{0.7, 0.15, 0.15};

  void validate() const;  // throws std::invalid_argument
};

nlohmann::json to_json(const TrainConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochRecord {
  std::size_t epoch = 0;
  LossBreakdown loss;             // mean over the epoch's batches
  std::optional<double> val_rmse; // raw outcome units; empty without a validation split
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

nlohmann::json to_json(const EpochRecord& r);

struct TrainResult {
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::size_t epoch, std::size_t batch);
  std::size_t epoch;
  std::size_t batch;
};

// RMSE of the pooled one-step and multi-horizon predictions on a normalized
// dataset, scaled back to raw units by `y_span`.
double validation_rmse(net::Network& net, const data::Dataset& norm, double y_span);

// Trains `net` in place on normalized splits.  `on_epoch` sees every record as
// it is produced.
TrainResult train(net::Network& net, const data::Dataset& train_norm,
                  const data::Dataset& valid_norm, const TrainConfig& cfg, double y_span,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace tcf::train
