#include "tcf/service/run_config.hpp"

#include <fstream>
#include <stdexcept>

namespace tcf::service {

RunConfig default_run_config() { return RunConfig{}; }

nlohmann::json to_json(const RunConfig& c) {
  auto model = net::to_json(c.model);
  for (const char* k : {"d_x", "d_v", "k"})
    if (model.contains(k) && model[k] == 0) model.erase(k);
  return {{"schema_version", kSchemaVersion}, {"model", model}, {"train", train::to_json(c.train)}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "schema_version" && key != "model" && key != "train")
      throw std::invalid_argument("config: unknown key '" + key + "'");
  if (j.contains("schema_version") && j["schema_version"] != kSchemaVersion)
    throw std::invalid_argument("config: unsupported schema_version " + j["schema_version"].dump());
  RunConfig c;
  if (j.contains("model")) {
    auto m = net::to_json(c.model);
    if (!j["model"].is_object()) throw std::invalid_argument("config: 'model' must be an object");
    for (const auto& [key, value] : j["model"].items()) {
      if (!m.contains(key)) throw std::invalid_argument("config: unknown key 'model." + key + "'");
      m[key] = value;
    }
    try {
      c.model = net::model_config_from_json(m);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config: model: ") + e.what());
    }
    // Dimension checks wait for the data.
    auto probe = c.model;
    if (probe.d_x == 0) probe.d_x = 1;
    if (probe.d_v == 0) probe.d_v = 1;
    if (probe.k == 0) probe.k = 1;
    probe.validate();
  }
  if (j.contains("train")) {
    try {
      c.train = train::train_config_from_json(j["train"]);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config: train: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("config: train: ") + e.what());
    }
  }
  c.train.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
  return run_config_from_json(j);
}

void bind_dims(RunConfig& c, const data::Dims& dims) {
  auto bind = [](std::size_t& field, std::size_t value, const char* name) {
    if (field != 0 && field != value)
      throw std::invalid_argument(std::string("config: model.") + name + " = " +
                                  std::to_string(field) + " but the data has " +
                                  std::to_string(value));
    field = value;
  };
  bind(c.model.d_x, dims.d_x, "d_x");
  bind(c.model.d_v, dims.d_v, "d_v");
  bind(c.model.k, dims.k, "k");
  c.model.validate();
  c.train.validate();
}

}  // namespace tcf::service
