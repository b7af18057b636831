#pragma once
// Simulator selection and the sidecar config written next to a dataset.
//   {"schema_version":1,"model":"tumour"|"synthetic","params":{...}}

#include <memory>
#include <string>
#include <utility>
#include <variant>

#include <json.hpp>

#include "tcf/sim/synthetic.hpp"
#include "tcf/sim/tumour.hpp"

namespace tcf::sim {

using SimSpec = std::variant<TumourParams, SyntheticConfig>;

std::string model_name(const SimSpec& spec);
nlohmann::json to_json(const SimSpec& spec);
SimSpec sim_spec_from_json(const nlohmann::json& j);

void save_sim_spec(const SimSpec& spec, const std::string& path);
SimSpec load_sim_spec(const std::string& path);

std::unique_ptr<Oracle> make_oracle(const SimSpec& spec);
std::pair<data::Dataset, GroundTruthTable> run_simulation(const SimSpec& spec);

// Sidecar paths for a dataset file "d.jsonl": "d.truth.jsonl", "d.sim.json".
std::string truth_path(const std::string& dataset_path);
std::string sim_spec_path(const std::string& dataset_path);

}  // namespace tcf::sim
