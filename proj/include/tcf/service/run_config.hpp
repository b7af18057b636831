#pragma once
// Training run configuration file.
//
//   {"schema_version": 1,
//    "model": {"d_r": 64, "d_z": 8, "tau_max": 3, "depth": 1, "head_hidden": 32},
//    "train": {"epochs": 40, "batch_size": 32, "lr": 0.001, ...}}
//
// Model dimensions (d_x, d_v, k) come from the dataset; when present in the
// file they must agree with it.  Missing keys keep their defaults, unknown
// keys are rejected.

#include <optional>
#include <string>

#include <json.hpp>

#include "tcf/data/dataset.hpp"
#include "tcf/net/config.hpp"
#include "tcf/train/trainer.hpp"

namespace tcf::service {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  net::ModelConfig model;  // dims may be zero until bound to a dataset
  train::TrainConfig train;
};

RunConfig default_run_config();
nlohmann::json to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Fills (or checks) d_x, d_v, k from the data and validates the whole config.
void bind_dims(RunConfig& c, const data::Dims& dims);

}  // namespace tcf::service
