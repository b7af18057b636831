#pragma once
// JSON request handling shared by the CLI and the HTTP service.
//
// Forecast request:
//   {"schema_version": 1,
//    "entity_id": "p0003", "t": 12,          // or "history": {x, v, y, a}
//    "horizon": 3,
//    "plan": [{"offset": 2, "a": [1, 0], "v": [4.5, 2.0]}],
//    "interaction_form": "active_only"}      // or "literal"
// Plan offsets are 1-based plan steps; steps not listed get no treatment.
// Missing v defaults to the per-feature mean over the history.  `t` defaults
// to the full trajectory.
//
// Forecast response: per-step forecast, the completed plan, the outcome set
// of the last step (none, single[k], requested), cate[k] = single[k] - none,
// delta_ci from the outcome set, and the model fingerprint.  All outcomes are
// in raw units.
//
// Recommend request: the same history selection plus "horizon", optional
// "goal" ("minimize" | "maximize") and "top".

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tcf/data/dataset.hpp"
#include "tcf/data/history.hpp"
#include "tcf/effects/estimators.hpp"
#include "tcf/effects/recommend.hpp"
#include "tcf/net/checkpoint.hpp"
#include "tcf/net/forecaster.hpp"

namespace tcf::service {

// status: 400 malformed, 404 unknown entity, 422 over-horizon.
class RequestError : public std::runtime_error {
 public:
  RequestError(int status, std::string path, const std::string& message);
  int status;
  std::string path;
};

// Immutable after construction; safe to share across threads.
class ServiceContext {
 public:
  ServiceContext(net::Checkpoint ckpt, data::Dataset data, effects::Goal goal);
  ServiceContext(const ServiceContext&) = delete;
  ServiceContext& operator=(const ServiceContext&) = delete;

  const net::Checkpoint& checkpoint() const { return ckpt_; }
  const net::Forecaster& forecaster() const { return *fc_; }
  const data::Dataset& data() const { return data_; }
  effects::Goal goal() const { return goal_; }
  const data::Trajectory* find(const std::string& id) const;

 private:
  net::Checkpoint ckpt_;
  std::unique_ptr<net::Forecaster> fc_;
  data::Dataset data_;
  std::map<std::string, std::size_t> index_;
  effects::Goal goal_;
};

// Loads a checkpoint and, when `data_path` is non-empty, a dataset.  The goal
// follows the dataset's simulator sidecar when there is one.
std::unique_ptr<ServiceContext> load_context(const std::string& ckpt_dir,
                                             const std::string& data_path,
                                             std::optional<effects::Goal> goal = std::nullopt);

nlohmann::json health_json();
nlohmann::json model_json(const ServiceContext& ctx);
nlohmann::json entities_json(const ServiceContext& ctx);
nlohmann::json history_json(const ServiceContext& ctx, const std::string& entity_id);
nlohmann::json forecast_response(const ServiceContext& ctx, const nlohmann::json& request);
nlohmann::json recommend_response(const ServiceContext& ctx, const nlohmann::json& request);
nlohmann::json error_json(const RequestError& e);

// Recomputes delta_ci from a forecast response's outcome set.
double delta_ci_from_response(const nlohmann::json& response);

}  // namespace tcf::service
