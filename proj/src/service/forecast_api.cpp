#include "tcf/service/forecast_api.hpp"

#include <filesystem>
#include <set>

#include "tcf/effects/metrics.hpp"
#include "tcf/service/run_config.hpp"
#include "tcf/sim/sim_config.hpp"

namespace tcf::service {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  throw RequestError(400, path, msg);
}

std::size_t get_size(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) bad(path, "expected an integer");
  if (j.get<long long>() < 0) bad(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<double> get_doubles(const json& j, const std::string& path, std::size_t n) {
  if (!j.is_array()) bad(path, "expected an array of numbers");
  if (j.size() != n) bad(path, "expected " + std::to_string(n) + " values, got " + std::to_string(j.size()));
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_number()) bad(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::vector<std::uint8_t> get_bits(const json& j, const std::string& path, std::size_t k) {
  if (!j.is_array()) bad(path, "expected an array of 0/1");
  if (j.size() != k) bad(path, "expected " + std::to_string(k) + " bits, got " + std::to_string(j.size()));
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < k; ++i) {
    if (!j[i].is_number_integer() || (j[i] != 0 && j[i] != 1))
      bad(path + "[" + std::to_string(i) + "]", "expected 0 or 1");
    out.push_back(j[i].get<std::uint8_t>());
  }
  return out;
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : keys) ok = ok || key == k;
    if (!ok) bad(path.empty() ? key : path + "." + key, "unknown field");
  }
}

void check_version(const json& req) {
  if (!req.is_object()) bad("", "request body must be a JSON object");
  if (req.contains("schema_version") && req["schema_version"] != kSchemaVersion)
    bad("schema_version", "unsupported schema version");
}

struct Selected {
  data::History history;
  std::string entity_id;
};

Selected select_history(const ServiceContext& ctx, const json& req) {
  const auto dims = ctx.checkpoint().info.model.dims();
  const bool by_id = req.contains("entity_id");
  const bool inline_h = req.contains("history");
  if (by_id == inline_h) bad("entity_id", "give exactly one of 'entity_id' and 'history'");
  if (by_id) {
    if (!req["entity_id"].is_string()) bad("entity_id", "expected a string");
    const std::string id = req["entity_id"];
    const auto* tr = ctx.find(id);
    if (!tr) throw RequestError(404, "entity_id", "unknown entity '" + id + "'");
    std::size_t t = tr->length();
    if (req.contains("t")) {
      t = get_size(req["t"], "t");
      if (t < 1 || t > tr->length())
        bad("t", "must be in 1.." + std::to_string(tr->length()));
    }
    return {data::build_history(*tr, dims, t), id};
  }
  if (req.contains("t")) bad("t", "only valid with 'entity_id'");
  const json& h = req["history"];
  if (!h.is_object()) bad("history", "expected an object");
  check_keys(h, "history", {"x", "v", "y", "a"});
  for (const char* k : {"x", "v", "y"})
    if (!h.contains(k)) bad(std::string("history.") + k, "missing");
  if (!h["y"].is_array() || h["y"].empty()) bad("history.y", "expected a non-empty array");
  data::History out;
  out.dims = dims;
  out.t = h["y"].size();
  out.y = get_doubles(h["y"], "history.y", out.t);
  auto rows = [&](const char* key, std::size_t n, std::size_t width, auto&& parse, auto& dst) {
    const std::string p = std::string("history.") + key;
    const json empty = json::array();
    const json& arr = h.contains(key) ? h[key] : empty;
    if (!arr.is_array() || arr.size() != n)
      bad(p, "expected " + std::to_string(n) + " rows");
    for (std::size_t i = 0; i < n; ++i) dst.push_back(parse(arr[i], p + "[" + std::to_string(i) + "]", width));
  };
  rows("x", out.t, dims.d_x, get_doubles, out.x);
  rows("v", out.t, dims.d_v * dims.k, get_doubles, out.v);
  rows("a", out.t - 1, dims.k, get_bits, out.a);
  return {std::move(out), ""};
}

std::size_t get_horizon(const ServiceContext& ctx, const json& req) {
  if (!req.contains("horizon")) bad("horizon", "missing");
  const std::size_t tau = get_size(req["horizon"], "horizon");
  if (tau < 1) bad("horizon", "must be >= 1");
  const std::size_t tau_max = ctx.checkpoint().info.model.tau_max;
  if (tau > tau_max)
    throw RequestError(422, "horizon",
                       "horizon " + std::to_string(tau) + " exceeds the model's tau_max " +
                           std::to_string(tau_max));
  return tau;
}

net::Plan parse_plan(const ServiceContext& ctx, const json& req, std::size_t tau) {
  const auto dims = ctx.checkpoint().info.model.dims();
  net::Plan plan(tau, net::PlannedStep{std::vector<std::uint8_t>(dims.k, 0), {}});
  if (!req.contains("plan")) return plan;
  const json& p = req["plan"];
  if (!p.is_array()) bad("plan", "expected an array");
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::string path = "plan[" + std::to_string(i) + "]";
    if (!p[i].is_object()) bad(path, "expected an object");
    check_keys(p[i], path, {"offset", "a", "v"});
    if (!p[i].contains("offset")) bad(path + ".offset", "missing");
    const std::size_t off = get_size(p[i]["offset"], path + ".offset");
    if (off < 1) bad(path + ".offset", "must be >= 1");
    if (off > tau)
      throw RequestError(422, path + ".offset",
                         "offset " + std::to_string(off) + " is beyond the horizon " + std::to_string(tau));
    if (!seen.insert(off).second) bad(path + ".offset", "duplicate offset");
    if (!p[i].contains("a")) bad(path + ".a", "missing");
    plan[off - 1].a = get_bits(p[i]["a"], path + ".a", dims.k);
    if (p[i].contains("v")) plan[off - 1].v = get_doubles(p[i]["v"], path + ".v", dims.d_v * dims.k);
  }
  return plan;
}

json plan_json(const net::Plan& plan) {
  json out = json::array();
  for (std::size_t j = 0; j < plan.size(); ++j)
    out.push_back({{"offset", j + 1}, {"a", plan[j].a}, {"v", plan[j].v}});
  return out;
}

json step_json(const data::TimeStep& st) {
  return {{"x", st.x}, {"v", st.v}, {"a", st.a}, {"y", st.y}};
}

}  // namespace

RequestError::RequestError(int status_, std::string path_, const std::string& message)
    : std::runtime_error(message), status(status_), path(std::move(path_)) {}

ServiceContext::ServiceContext(net::Checkpoint ckpt, data::Dataset data, effects::Goal goal)
    : ckpt_(std::move(ckpt)), data_(std::move(data)), goal_(goal) {
  if (!ckpt_.network) throw std::invalid_argument("service: checkpoint has no network");
  if (!data_.trajectories.empty() && !(data_.dims == ckpt_.info.model.dims()))
    throw std::invalid_argument("service: dataset dimensions do not match the model");
  fc_ = std::make_unique<net::Forecaster>(*ckpt_.network, ckpt_.info.stats);
  for (std::size_t i = 0; i < data_.trajectories.size(); ++i)
    index_.emplace(data_.trajectories[i].entity_id, i);
}

const data::Trajectory* ServiceContext::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &data_.trajectories[it->second];
}

std::unique_ptr<ServiceContext> load_context(const std::string& ckpt_dir,
                                             const std::string& data_path,
                                             std::optional<effects::Goal> goal) {
  auto ckpt = net::load_checkpoint(ckpt_dir);
  data::Dataset ds;
  ds.dims = ckpt.info.model.dims();
  effects::Goal g = effects::Goal::Minimize;
  if (!data_path.empty()) {
    ds = data::load_dataset(data_path);
    const auto spec_path = sim::sim_spec_path(data_path);
    if (std::filesystem::exists(spec_path)) {
      const auto spec = sim::load_sim_spec(spec_path);
      g = effects::default_goal(&spec);
    }
  }
  if (goal) g = *goal;
  return std::make_unique<ServiceContext>(std::move(ckpt), std::move(ds), g);
}

json health_json() { return {{"schema_version", kSchemaVersion}, {"status", "ok"}}; }

json model_json(const ServiceContext& ctx) {
  const auto& c = ctx.checkpoint();
  return {{"schema_version", kSchemaVersion},
          {"model_config", net::to_json(c.info.model)},
          {"train_config", c.info.train_config},
          {"config_hash", c.config_hash},
          {"model_fingerprint", c.model_fingerprint},
          {"dataset_fingerprint", c.info.dataset_fingerprint},
          {"k", c.info.model.k},
          {"tau_max", c.info.model.tau_max},
          {"goal", effects::to_string(ctx.goal())}};
}

json entities_json(const ServiceContext& ctx) {
  json list = json::array();
  for (const auto& tr : ctx.data().trajectories)
    list.push_back({{"entity_id", tr.entity_id}, {"length", tr.length()}, {"status", tr.status}});
  return {{"schema_version", kSchemaVersion}, {"entities", list}};
}

json history_json(const ServiceContext& ctx, const std::string& entity_id) {
  const auto* tr = ctx.find(entity_id);
  if (!tr) throw RequestError(404, "entity_id", "unknown entity '" + entity_id + "'");
  json steps = json::array();
  for (const auto& st : tr->steps) steps.push_back(step_json(st));
  return {{"schema_version", kSchemaVersion},
          {"entity_id", tr->entity_id},
          {"status", tr->status},
          {"steps", steps}};
}

json forecast_response(const ServiceContext& ctx, const json& req) {
  check_version(req);
  check_keys(req, "", {"schema_version", "entity_id", "t", "history", "horizon", "plan",
                       "interaction_form"});
  auto sel = select_history(ctx, req);
  const std::size_t tau = get_horizon(ctx, req);
  auto form = effects::InteractionForm::ActiveOnly;
  if (req.contains("interaction_form")) {
    const auto& f = req["interaction_form"];
    if (f == "literal")
      form = effects::InteractionForm::Literal;
    else if (f != "active_only")
      bad("interaction_form", "expected 'active_only' or 'literal'");
  }
  const auto& fc = ctx.forecaster();
  const auto plan = fc.complete_plan(sel.history, parse_plan(ctx, req, tau));
  const auto y = fc.forecast(sel.history, plan);
  const auto os = fc.outcome_set(sel.history, plan);
  std::vector<double> cate;
  for (double s : os.single) cate.push_back(s - os.none);

  json out = {{"schema_version", kSchemaVersion},
              {"t", sel.history.t},
              {"horizon", tau},
              {"plan", plan_json(plan)},
              {"forecast", y},
              {"outcome_set",
               {{"a", os.a}, {"none", os.none}, {"single", os.single}, {"requested", os.requested}}},
              {"cate", cate},
              {"interaction_form",
               form == effects::InteractionForm::Literal ? "literal" : "active_only"},
              {"delta_ci", effects::interaction_from_outcomes(os, form)},
              {"model_fingerprint", ctx.checkpoint().model_fingerprint}};
  out["entity_id"] = sel.entity_id.empty() ? json(nullptr) : json(sel.entity_id);
  return out;
}

json recommend_response(const ServiceContext& ctx, const json& req) {
  check_version(req);
  check_keys(req, "", {"schema_version", "entity_id", "t", "history", "horizon", "goal", "top"});
  auto sel = select_history(ctx, req);
  const std::size_t tau = get_horizon(ctx, req);
  auto goal = ctx.goal();
  if (req.contains("goal")) {
    if (!req["goal"].is_string()) bad("goal", "expected a string");
    try {
      goal = effects::goal_from_string(req["goal"]);
    } catch (const std::invalid_argument& e) {
      bad("goal", e.what());
    }
  }
  const auto& fc = ctx.forecaster();
  auto ranked = effects::recommend(fc, sel.history, tau,
                                   effects::default_candidates(fc.config().k, tau), goal);
  std::size_t top = ranked.size();
  if (req.contains("top")) top = std::min(top, get_size(req["top"], "top"));
  json list = json::array();
  for (std::size_t i = 0; i < top; ++i) {
    auto r = effects::to_json(ranked[i]);
    r["rank"] = i + 1;
    list.push_back(std::move(r));
  }
  json out = {{"schema_version", kSchemaVersion}, {"t", sel.history.t},
              {"horizon", tau},                   {"goal", effects::to_string(goal)},
              {"candidates", ranked.size()},      {"ranked", list},
              {"model_fingerprint", ctx.checkpoint().model_fingerprint}};
  out["entity_id"] = sel.entity_id.empty() ? json(nullptr) : json(sel.entity_id);
  return out;
}

json error_json(const RequestError& e) {
  return {{"schema_version", kSchemaVersion},
          {"error", {{"status", e.status}, {"path", e.path}, {"message", e.what()}}}};
}

double delta_ci_from_response(const json& r) {
  const auto& os = r.at("outcome_set");
  net::OutcomeSet s;
  s.a = os.at("a").get<std::vector<std::uint8_t>>();
  s.none = os.at("none");
  s.single = os.at("single").get<std::vector<double>>();
  s.requested = os.at("requested");
  const auto form = r.at("interaction_form") == "literal" ? effects::InteractionForm::Literal
                                                          : effects::InteractionForm::ActiveOnly;
  return effects::interaction_from_outcomes(s, form);
}

}  // namespace tcf::service
