#include "picksort/http_server.hpp"

#include <httplib.h>

namespace picksort {

using nlohmann::json;

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  if (api.body.is_null()) {
    res.set_content("", "application/json");
  } else {
    res.set_content(api.body.dump(), "application/json");
  }
}

template <typename Handler>
httplib::Server::Handler json_endpoint(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      send(res, {400, {{"error", "malformed_request"}, {"message", "body is not valid JSON"}}});
      return;
    }
    send(res, handler(body));
  };
}

}  // namespace

HttpServer::HttpServer(AuthService& service) : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  // SO_REUSEADDR only: a port held by another process must fail to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  const std::string origin = service.service_config().cors_origin;
  if (!origin.empty()) {
    server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                                {"Access-Control-Allow-Headers", "Content-Type, Authorization"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }

  server.Post("/api/register", json_endpoint([&service](const json& b) { return service.register_user(b); }));
  server.Post("/api/challenge", json_endpoint([&service](const json& b) { return service.challenge(b); }));
  server.Post("/api/login", json_endpoint([&service](const json& b) { return service.login(b); }));
  server.Get("/api/config", [&service](const httplib::Request&, httplib::Response& res) { send(res, service.config()); });
  server.Get("/api/analytics", [&service](const httplib::Request& req, httplib::Response& res) {
    const bool secrets = req.has_param("include") && req.get_param_value("include") == "secrets";
    const auto api = service.analytics(req.get_header_value("Authorization"), secrets);
    if (api.status == 200) {
      res.status = 200;
      res.set_content(report_to_string(api.body), "application/json");
    } else {
      send(res, api);
    }
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

int HttpServer::bind_any_port(const std::string& host) {
  port_ = impl_->server.bind_to_any_port(host);
  return port_;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  thread_ = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace picksort
