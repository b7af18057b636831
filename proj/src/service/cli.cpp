#include "tcf/service/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tcf/data/normalize.hpp"
#include "tcf/data/split.hpp"
#include "tcf/effects/metrics.hpp"
#include "tcf/service/forecast_api.hpp"
#include "tcf/service/http_server.hpp"
#include "tcf/service/run_config.hpp"
#include "tcf/sim/sim_config.hpp"
#include "tcf/simd/kernels.hpp"
#include "tcf/util/hash.hpp"
#include "tcf/util/log.hpp"

namespace tcf::service {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string data, out, ckpt, config, model = "tumour", request, entity, plan, goal, form,
      split = "test", host = "127.0.0.1";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> tau, t, patients, steps, top;
  std::optional<double> gamma_c, gamma_r;
  std::size_t stride = 5;
  int port = 8080;
  bool deterministic = false;
  bool emit_default = false;
};

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return json::parse(in);
}

// --- simulate -------------------------------------------------------------

int cmd_simulate(const Options& o, std::ostream& out) {
  sim::SimSpec spec;
  if (!o.config.empty()) {
    auto j = read_json_file(o.config);
    if (j.contains("model")) {
      spec = sim::sim_spec_from_json(j);
    } else {
      spec = sim::sim_spec_from_json({{"schema_version", 1}, {"model", o.model}, {"params", j}});
    }
  } else if (o.model == "tumour") {
    spec = sim::TumourParams{};
  } else if (o.model == "synthetic") {
    spec = sim::SyntheticConfig{};
  } else {
    throw CLI::ValidationError("--model", "expected 'tumour' or 'synthetic'");
  }
  if (auto* p = std::get_if<sim::TumourParams>(&spec)) {
    if (o.patients) p->patients = *o.patients;
    if (o.steps) p->steps = *o.steps;
    if (o.gamma_c) p->gamma_c = *o.gamma_c;
    if (o.gamma_r) p->gamma_r = *o.gamma_r;
    if (o.seed) p->seed = *o.seed;
    p->validate();
  } else {
    auto& c = std::get<sim::SyntheticConfig>(spec);
    if (o.gamma_c || o.gamma_r)
      throw CLI::ValidationError("--gamma-c/--gamma-r", "only apply to the tumour model");
    if (o.patients) c.entities = *o.patients;
    if (o.steps) c.steps = *o.steps;
    if (o.seed) c.seed = *o.seed;
    c.validate();
  }
  auto [ds, truth] = sim::run_simulation(spec);
  data::save_dataset(ds, o.out);
  truth.save(sim::truth_path(o.out));
  sim::save_sim_spec(spec, sim::sim_spec_path(o.out));
  out << json{{"schema_version", kSchemaVersion},
              {"model", sim::model_name(spec)},
              {"dataset", o.out},
              {"truth", sim::truth_path(o.out)},
              {"sim_config", sim::sim_spec_path(o.out)},
              {"entities", ds.trajectories.size()}}
             .dump()
      << "\n";
  return 0;
}

// --- train ----------------------------------------------------------------

int cmd_train(const Options& o, std::ostream& out) {
  if (o.emit_default) {
    out << to_json(default_run_config()).dump(2) << "\n";
    return 0;
  }
  if (o.data.empty()) throw CLI::RequiredError("--data");
  if (o.out.empty()) throw CLI::RequiredError("--out");
  RunConfig rc = o.config.empty() ? default_run_config() : load_run_config(o.config);
  if (o.seed) rc.train.seed = *o.seed;
  if (o.deterministic) rc.train.deterministic = true;
  if (o.tau) rc.model.tau_max = *o.tau;

  const auto ds = data::load_dataset(o.data);
  bind_dims(rc, ds.dims);
  if (rc.train.deterministic) simd::set_isa(simd::Isa::Scalar);
  auto parts = data::split(ds, rc.train.split, rc.train.seed);
  const auto stats = data::fit_stats(parts.train);
  const auto train_norm = data::normalize(parts.train, stats);
  const auto valid_norm = data::normalize(parts.valid, stats);

  net::Network net(rc.model, rc.train.seed);
  fs::create_directories(o.out);
  std::ofstream log(fs::path(o.out) / "train_log.jsonl");
  auto result = train::train(net, train_norm, valid_norm, rc.train, stats.y.span(),
                             [&](const train::EpochRecord& r) {
                               log << train::to_json(r).dump() << "\n";
                               log.flush();
                               spdlog::info("epoch {} L_y {:.6g} val_rmse {}", r.epoch, r.loss.l_y,
                                            r.val_rmse ? std::to_string(*r.val_rmse) : "-");
                             });

  net::CheckpointInfo info{rc.model, train::to_json(rc.train), file_fingerprint(o.data), stats};
  net::save_checkpoint(o.out, net, info);
  write_json((fs::path(o.out) / "run_config.json").string(), to_json(rc));
  const auto ckpt = net::load_checkpoint(o.out);
  json summary = {{"schema_version", kSchemaVersion},
                  {"checkpoint", o.out},
                  {"epochs", result.log.size()},
                  {"best_epoch", result.best_epoch},
                  {"model_fingerprint", ckpt.model_fingerprint}};
  if (!result.log.empty()) summary["final"] = train::to_json(result.log.back());
  out << summary.dump() << "\n";
  return 0;
}

// --- evaluate -------------------------------------------------------------

int cmd_evaluate(const Options& o, std::ostream& out) {
  if (o.deterministic) simd::set_isa(simd::Isa::Scalar);
  auto ckpt = net::load_checkpoint(o.ckpt);
  const auto tcfg = train::train_config_from_json(ckpt.info.train_config);
  const auto ds = data::load_dataset(o.data);
  if (!(ds.dims == ckpt.info.model.dims()))
    throw std::invalid_argument("dataset dimensions do not match the checkpoint");

  data::Dataset test;
  if (o.split == "test") {
    if (file_fingerprint(o.data) != ckpt.info.dataset_fingerprint)
      spdlog::warn("dataset differs from the one the checkpoint was trained on");
    test = data::split(ds, tcfg.split, tcfg.seed).test;
  } else if (o.split == "all") {
    test = ds;
  } else {
    throw CLI::ValidationError("--split", "expected 'test' or 'all'");
  }

  std::optional<sim::SimSpec> spec;
  std::unique_ptr<sim::Oracle> oracle;
  if (fs::exists(sim::sim_spec_path(o.data))) {
    spec = sim::load_sim_spec(sim::sim_spec_path(o.data));
    oracle = sim::make_oracle(*spec);
  }
  effects::EvalOptions eo;
  eo.tau = o.tau.value_or(ckpt.info.model.tau_max);
  eo.stride = o.stride;
  eo.goal = o.goal.empty() ? effects::default_goal(spec ? &*spec : nullptr)
                           : effects::goal_from_string(o.goal);
  eo.normalizer = effects::outcome_normalizer(spec ? &*spec : nullptr, test);

  net::Forecaster fc(*ckpt.network, ckpt.info.stats);
  std::vector<json> dump;
  auto rep = effects::evaluate(fc, test, oracle.get(), eo, o.out.empty() ? nullptr : &dump);
  auto j = effects::to_json(rep);
  j["model_fingerprint"] = ckpt.model_fingerprint;
  j["split"] = o.split;
  out << effects::to_table(rep);
  if (!o.out.empty()) {
    write_json(o.out, j);
    std::ofstream f(o.out + ".effects.jsonl");
    for (const auto& r : dump) f << r.dump() << "\n";
  } else {
    out << j.dump() << "\n";
  }
  return 0;
}

// --- forecast / recommend -------------------------------------------------

std::vector<std::vector<std::uint8_t>> parse_plan_string(const std::string& s) {
  std::vector<std::vector<std::uint8_t>> steps(1);
  for (char c : s) {
    if (c == '|')
      steps.emplace_back();
    else if (c == '0' || c == '1')
      steps.back().push_back(static_cast<std::uint8_t>(c - '0'));
    else
      throw CLI::ValidationError("--plan", "expected bit strings joined by '|', e.g. 10|00|01");
  }
  return steps;
}

json request_from_flags(const Options& o, bool forecast) {
  if (!o.request.empty()) {
    if (o.request == "-") return json::parse(std::cin);
    return read_json_file(o.request);
  }
  if (o.entity.empty()) throw CLI::RequiredError("--entity or --request");
  json req = {{"schema_version", kSchemaVersion}, {"entity_id", o.entity}};
  if (o.t) req["t"] = *o.t;
  std::size_t tau = o.tau.value_or(1);
  if (forecast && !o.plan.empty()) {
    auto steps = parse_plan_string(o.plan);
    if (!o.tau) tau = steps.size();
    json plan = json::array();
    for (std::size_t j = 0; j < steps.size(); ++j) plan.push_back({{"offset", j + 1}, {"a", steps[j]}});
    req["plan"] = plan;
  }
  req["horizon"] = tau;
  if (forecast && !o.form.empty()) req["interaction_form"] = o.form;
  if (!forecast && !o.goal.empty()) req["goal"] = o.goal;
  if (!forecast && o.top) req["top"] = *o.top;
  return req;
}

int cmd_query(const Options& o, std::ostream& out, std::ostream& err, bool forecast) {
  auto ctx = load_context(o.ckpt, o.data);
  const auto req = request_from_flags(o, forecast);
  try {
    out << (forecast ? forecast_response(*ctx, req) : recommend_response(*ctx, req)).dump() << "\n";
  } catch (const RequestError& e) {
    err << "error: " << (e.path.empty() ? "" : e.path + ": ") << e.what() << "\n";
    return e.status == 422 ? 3 : 2;
  }
  return 0;
}

// --- serve ----------------------------------------------------------------

HttpServer* g_server = nullptr;

int cmd_serve(const Options& o, std::ostream& out) {
  auto ctx = load_context(o.ckpt, o.data);
  HttpServer server(*ctx);
  const int port = server.bind(o.host, o.port);
  if (port < 0) throw std::runtime_error("cannot bind " + o.host + ":" + std::to_string(o.port));
  out << "listening on http://" << o.host << ":" << port << std::endl;
  g_server = &server;
  auto on_signal = [](int) {
    if (g_server) g_server->stop();
  };
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const bool ok = server.run();
  g_server = nullptr;
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  init_logging();
  Options o;
  CLI::App app{"Temporal counterfactual forecasting with multiple treatments", "tcf"};
  app.require_subcommand(1);

  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Root random seed"); };

  auto* sim_cmd = app.add_subcommand("simulate", "Generate a dataset with ground truth");
  sim_cmd->add_option("--model", o.model, "tumour | synthetic")->check(CLI::IsMember({"tumour", "synthetic"}));
  sim_cmd->add_option("--config", o.config, "Simulator parameters (JSON)");
  sim_cmd->add_option("--patients", o.patients, "Number of entities");
  sim_cmd->add_option("--steps", o.steps, "Steps per trajectory");
  sim_cmd->add_option("--gamma-c", o.gamma_c, "Chemotherapy selection bias");
  sim_cmd->add_option("--gamma-r", o.gamma_r, "Radiotherapy selection bias");
  sim_cmd->add_option("--out", o.out, "Dataset path (.jsonl)")->required();
  seed(sim_cmd);

  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--data", o.data, "Dataset path");
  train_cmd->add_option("--config", o.config, "Run config (JSON)");
  train_cmd->add_option("--out", o.out, "Checkpoint directory");
  train_cmd->add_option("--tau", o.tau, "Override model tau_max");
  train_cmd->add_flag("--deterministic", o.deterministic, "Scalar kernels, bit-reproducible");
  train_cmd->add_flag("--emit-default-config", o.emit_default, "Print the default config and exit");
  seed(train_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint on held-out data");
  eval_cmd->add_option("--ckpt", o.ckpt, "Checkpoint directory")->required();
  eval_cmd->add_option("--data", o.data, "Dataset path")->required();
  eval_cmd->add_option("--tau", o.tau, "Horizon (default tau_max)");
  eval_cmd->add_option("--out", o.out, "Report path (JSON)");
  eval_cmd->add_option("--goal", o.goal, "minimize | maximize");
  eval_cmd->add_option("--split", o.split, "test | all");
  eval_cmd->add_option("--stride", o.stride, "Evaluate every n-th time step")->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--deterministic", o.deterministic, "Scalar kernels");

  auto query = [&](CLI::App* c) {
    c->add_option("--ckpt", o.ckpt, "Checkpoint directory")->required();
    c->add_option("--data", o.data, "Dataset path (for entity lookup)");
    c->add_option("--request", o.request, "Request JSON file, '-' for stdin");
    c->add_option("--entity", o.entity, "Entity id");
    c->add_option("--t", o.t, "History length (default: all)");
    c->add_option("--tau", o.tau, "Horizon");
  };
  auto* fc_cmd = app.add_subcommand("forecast", "Forecast one plan (JSON to stdout)");
  query(fc_cmd);
  fc_cmd->add_option("--plan", o.plan, "Per-step treatment bits, e.g. 10|00|01");
  fc_cmd->add_option("--form", o.form, "active_only | literal");
  auto* rec_cmd = app.add_subcommand("recommend", "Rank candidate plans (JSON to stdout)");
  query(rec_cmd);
  rec_cmd->add_option("--goal", o.goal, "minimize | maximize");
  rec_cmd->add_option("--top", o.top, "Keep the best n plans");

  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
  serve_cmd->add_option("--ckpt", o.ckpt, "Checkpoint directory")->required();
  serve_cmd->add_option("--data", o.data, "Dataset path");
  serve_cmd->add_option("--port", o.port, "Port (0 = any)");
  serve_cmd->add_option("--host", o.host, "Bind address");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return e.get_exit_code() == 0 ? 0 : (code == 0 ? 2 : code);
  }
  try {
    if (sim_cmd->parsed()) return cmd_simulate(o, out);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (eval_cmd->parsed()) return cmd_evaluate(o, out);
    if (fc_cmd->parsed()) return cmd_query(o, out, err, true);
    if (rec_cmd->parsed()) return cmd_query(o, out, err, false);
    if (serve_cmd->parsed()) return cmd_serve(o, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n" << app.help() << "\n";
    return 2;
  } catch (const net::CheckpointError& e) {
    err << "error: checkpoint refused: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace tcf::service
