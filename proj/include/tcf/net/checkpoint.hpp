#pragma once
// Checkpoint directory layout:
//   manifest.json     format version, model config, training config, config
//                     hash, dataset fingerprint, parameter names and shapes
//   params.bin        parameter values as little-endian doubles, manifest order
//   norm_stats.json   feature scaling fitted on the training split
//   train_log.jsonl   written by the trainer, not read back here

#include <memory>
#include <string>

#include <json.hpp>

#include "tcf/data/normalize.hpp"
#include "tcf/net/config.hpp"
#include "tcf/net/network.hpp"

namespace tcf::net {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointInfo {
  ModelConfig model;
  nlohmann::json train_config = nlohmann::json::object();
  std::string dataset_fingerprint;
  data::NormStats stats;
};

struct Checkpoint {
  CheckpointInfo info;
  std::unique_ptr<Network> network;
  std::string config_hash;
  // Hash over the config hash and the parameter bytes.
  std::string model_fingerprint;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string config_hash(const ModelConfig& model, const nlohmann::json& train_config);

// Creates `dir` if needed and overwrites the files it owns.
void save_checkpoint(const std::string& dir, const Network& net, const CheckpointInfo& info);

// Throws CheckpointError for missing files, version or hash mismatches and
// blob/manifest disagreement.
Checkpoint load_checkpoint(const std::string& dir);

// Fingerprint of the parameters as they would be saved.
std::string model_fingerprint(const Network& net, const CheckpointInfo& info);

}  // namespace tcf::net
