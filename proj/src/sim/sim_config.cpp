#include "tcf/sim/sim_config.hpp"

#include <fstream>
#include <stdexcept>

namespace tcf::sim {
namespace {

std::string stem(const std::string& path) {
  const std::string ext = ".jsonl";
  if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
    return path.substr(0, path.size() - ext.size());
  return path;
}

}  // namespace

std::string model_name(const SimSpec& spec) {
  return std::holds_alternative<TumourParams>(spec) ? "tumour" : "synthetic";
}

nlohmann::json to_json(const SimSpec& spec) {
  nlohmann::json params = std::visit([](const auto& p) { return to_json(p); }, spec);
  return {{"schema_version", 1}, {"model", model_name(spec)}, {"params", params}};
}

SimSpec sim_spec_from_json(const nlohmann::json& j) {
  const auto model = j.at("model").get<std::string>();
  const auto params = j.value("params", nlohmann::json::object());
  if (model == "tumour") return tumour_params_from_json(params);
  if (model == "synthetic") return synthetic_config_from_json(params);
  throw std::invalid_argument("unknown simulator model '" + model + "'");
}

void save_sim_spec(const SimSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(spec).dump(2) << '\n';
}

SimSpec load_sim_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return sim_spec_from_json(nlohmann::json::parse(in));
}

std::unique_ptr<Oracle> make_oracle(const SimSpec& spec) {
  if (const auto* p = std::get_if<TumourParams>(&spec))
    return std::make_unique<TumourSimulator>(*p);
  return std::make_unique<SyntheticSimulator>(std::get<SyntheticConfig>(spec));
}

std::pair<data::Dataset, GroundTruthTable> run_simulation(const SimSpec& spec) {
  if (const auto* p = std::get_if<TumourParams>(&spec)) return simulate_tumour(*p);
  return simulate_synthetic(std::get<SyntheticConfig>(spec));
}

std::string truth_path(const std::string& dataset_path) {
  return stem(dataset_path) + ".truth.jsonl";
}

std::string sim_spec_path(const std::string& dataset_path) {
  return stem(dataset_path) + ".sim.json";
}

}  // namespace tcf::sim
