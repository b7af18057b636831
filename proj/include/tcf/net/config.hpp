#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "tcf/data/dataset.hpp"

namespace tcf::net {

struct ModelConfig {
  std::size_t d_x = 0;
  std::size_t d_v = 0;
  std::size_t k = 0;
  std::size_t d_r = 64;          // representation width (recurrent state)
  std::size_t d_z = 8;           // medium representation width per treatment
  std::size_t tau_max = 3;       // decoder horizon
  std::size_t depth = 1;         // stacked recurrent layers
  std::size_t head_hidden = 32;  // hidden width of the outcome and treatment heads

  data::Dims dims() const { return {d_x, d_v, k}; }
  // [x_s, v_s, a_{s-1}, y_s]
  std::size_t encoder_input() const { return d_x + d_v * k + k + 1; }
  // [v_j, a_{j-1}, y_hat_j]
  std::size_t decoder_input() const { return d_v * k + k + 1; }

  void validate() const;  // throws std::invalid_argument
  bool operator==(const ModelConfig&) const = default;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace tcf::net
