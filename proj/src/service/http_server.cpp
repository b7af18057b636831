#include "tcf/service/http_server.hpp"

#include <httplib.h>

#include "tcf/util/log.hpp"

namespace tcf::service {
namespace {

using nlohmann::json;

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const RequestError& e) { send(res, e.status, error_json(e)); }

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    send(res, 200, f());
  } catch (const RequestError& e) {
    send_error(res, e);
  } catch (const json::parse_error& e) {
    send_error(res, RequestError(400, "", std::string("malformed JSON: ") + e.what()));
  } catch (const std::exception& e) {
    spdlog::error("request failed: {}", e.what());
    send_error(res, RequestError(500, "", e.what()));
  }
}

}  // namespace

HttpServer::HttpServer(const ServiceContext& ctx) : srv_(std::make_unique<httplib::Server>()) {
  auto& s = *srv_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  s.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    guarded(res, [] { return health_json(); });
  });
  s.Get("/model", [&ctx](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return model_json(ctx); });
  });
  s.Get("/entities", [&ctx](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return entities_json(ctx); });
  });
  s.Get(R"(/entities/([^/]+)/history)", [&ctx](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return history_json(ctx, req.matches[1].str()); });
  });
  s.Post("/forecast", [&ctx](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return forecast_response(ctx, json::parse(req.body)); });
  });
  s.Post("/recommend", [&ctx](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return recommend_response(ctx, json::parse(req.body)); });
  });
  s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    send_error(res, RequestError(res.status, "", "no route for " + req.method + " " + req.path));
  });
  s.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("{} {} -> {}", req.method, req.path, res.status);
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return srv_->bind_to_any_port(host);
  return srv_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return srv_->listen_after_bind(); }
void HttpServer::stop() { srv_->stop(); }
void HttpServer::wait_until_ready() const { srv_->wait_until_ready(); }

}  // namespace tcf::service
