#pragma once
// HTTP inference service.
//
//   GET  /health                 {"status":"ok"}
//   GET  /model                  configs, tau_max, fingerprints
//   GET  /entities               ids, lengths, status
//   GET  /entities/{id}/history  observed steps
//   POST /forecast               see forecast_api.hpp
//   POST /recommend
//
// Errors come back as {"schema_version":1,"error":{"status","path","message"}}
// with 400 (malformed body), 404 (unknown entity or route) or 422 (horizon).

#include <memory>
#include <string>

#include "tcf/service/forecast_api.hpp"

namespace httplib {
class Server;
}

namespace tcf::service {

class HttpServer {
 public:
  explicit HttpServer(const ServiceContext& ctx);
  ~HttpServer();

  // port 0 picks a free port.  Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool run();
  void stop();
  // Blocks until the listener is accepting.
  void wait_until_ready() const;

 private:
  std::unique_ptr<httplib::Server> srv_;
};

}  // namespace tcf::service
