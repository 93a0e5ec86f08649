#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include "picksort/http_server.hpp"
#include "picksort/service.hpp"
#include "test_support.hpp"

using namespace picksort;
using namespace picksort::testing;
using nlohmann::json;

namespace {

ServiceConfig http_config() {
  ServiceConfig c;
  c.admin_token = "admin";
  c.cors_origin = "http://ui.example";
  return c;
}

const char* kSecret = R"([{"cell":0,"set_id":"colors","element_id":"black"},
                          {"cell":5,"set_id":"icons","element_id":"fire"},
                          {"cell":10,"set_id":"shapes","element_id":"square"}])";

}  // namespace

TEST_CASE("JSON API over HTTP") {
  AuthService service(http_config(), prototype_policy());
  HttpServer server(service);
  const int port = server.bind_any_port("127.0.0.1");
  REQUIRE(port > 0);
  server.start();
  httplib::Client client("127.0.0.1", port);

  const json reg = {{"username", "alice"}, {"placements", json::parse(kSecret)}};
  auto r = client.Post("/api/register", reg.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == 201);
  CHECK(r->body.empty());
  CHECK(r->get_header_value("Access-Control-Allow-Origin") == "http://ui.example");

  r = client.Post("/api/register", reg.dump(), "application/json");
  CHECK(r->status == 409);

  r = client.Post("/api/register", "{not json", "application/json");
  CHECK(r->status == 400);
  CHECK(json::parse(r->body)["error"] == "malformed_request");

  r = client.Post("/api/challenge", json{{"username", "alice"}}.dump(), "application/json");
  REQUIRE(r->status == 200);
  const auto challenge = json::parse(r->body);
  CHECK(challenge["per_set_order"]["icons"].size() == 90);
  const auto token = challenge["token"].get<std::string>();

  const json login = {{"username", "alice"}, {"token", token}, {"placements", json::parse(kSecret)}};
  r = client.Post("/api/login", login.dump(), "application/json");
  CHECK(r->status == 200);
  CHECK(json::parse(r->body) == json{{"success", true}});
  r = client.Post("/api/login", login.dump(), "application/json");
  CHECK(r->status == 400);
  CHECK(json::parse(r->body)["error"] == "invalid_token");

  r = client.Get("/api/config");
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["sets"].size() == 3);

  r = client.Get("/api/analytics");
  CHECK(r->status == 401);
  r = client.Get("/api/analytics", {{"Authorization", "Bearer admin"}});
  CHECK(r->status == 200);
  CHECK(r->body == report_to_string(service.analytics_report()));
  CHECK(json::parse(r->body)["attempts"]["successes"] == 1);
  r = client.Get("/api/analytics?include=secrets", {{"Authorization", "Bearer admin"}});
  CHECK(r->status == 409);

  r = client.Options("/api/login");
  CHECK(r->status == 204);
  CHECK(r->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  r = client.Get("/api/unknown");
  CHECK(r->status == 404);
  server.stop();
}

TEST_CASE("a port in use cannot be bound twice") {
  AuthService service(http_config(), prototype_policy());
  HttpServer first(service);
  const int port = first.bind_any_port("127.0.0.1");
  REQUIRE(port > 0);
  HttpServer second(service);
  CHECK_FALSE(second.bind("127.0.0.1", port));
}
