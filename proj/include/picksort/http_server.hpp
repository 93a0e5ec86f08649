#pragma once

// HTTP binding for AuthService (cpp-httplib underneath).

#include <memory>
#include <string>
#include <thread>

#include "picksort/service.hpp"

namespace picksort {

class HttpServer {
 public:
  explicit HttpServer(AuthService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// False when the address cannot be bound (e.g. port in use).
  bool bind(const std::string& host, int port);
  /// Binds an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);

  /// Serves until stop(); requires a prior successful bind.
  void listen();
  /// listen() on a background thread; returns once the server accepts.
  void start();
  void stop();

  int port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace picksort
