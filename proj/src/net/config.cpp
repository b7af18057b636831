#include "tcf/net/config.hpp"

#include <stdexcept>

namespace tcf::net {

void ModelConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("model config: ") + what);
  };
  need(d_x > 0, "d_x must be > 0");
  need(d_v > 0, "d_v must be > 0");
  need(k > 0, "k must be > 0");
  need(k <= 16, "k must be <= 16");
  need(d_r > 0, "d_r must be > 0");
  need(d_z > 0, "d_z must be > 0");
  need(tau_max >= 1, "tau_max must be >= 1");
  need(depth >= 1, "depth must be >= 1");
  need(head_hidden > 0, "head_hidden must be > 0");
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"d_x", c.d_x},     {"d_v", c.d_v},         {"k", c.k},
          {"d_r", c.d_r},     {"d_z", c.d_z},         {"tau_max", c.tau_max},
          {"depth", c.depth}, {"head_hidden", c.head_hidden}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  const auto known = to_json(c);
  for (const auto& [key, _] : j.items())
    if (!known.contains(key))
      throw std::invalid_argument("model config: unknown key '" + key + "'");
  auto get = [&](const char* key, std::size_t& field) {
    if (j.contains(key)) field = j.at(key).get<std::size_t>();
  };
  get("d_x", c.d_x);
  get("d_v", c.d_v);
  get("k", c.k);
  get("d_r", c.d_r);
  get("d_z", c.d_z);
  get("tau_max", c.tau_max);
  get("depth", c.depth);
  get("head_hidden", c.head_hidden);
  return c;
}

}  // namespace tcf::net
