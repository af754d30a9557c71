#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "smecs/error.hpp"
#include "smecs/service.hpp"

namespace httplib {
class Server;
}

namespace smecs {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

int http_status(ErrorCode code);
// Stable kebab-case identifier used in error bodies, e.g. "rate-limited".
std::string error_slug(ErrorCode code);

// Routes one API call. Errors become {"error", "code", "detail"} bodies;
// nothing thrown escapes.
//
//   POST  /api/sessions                 {"url", "token"?}      -> 201 session
//   POST  /api/sessions/import[?session=ID]  CodeMeta document -> 201/200 session
//   GET   /api/sessions/ID                                     -> session
//   PATCH /api/sessions/ID/fields       {"path", "value"}      -> session
//   GET   /api/sessions/ID/export                              -> codemeta.json
//   GET   /api/vocab/licenses|languages?q=&limit=              -> [{id, label}]
//   GET   /api/health
ApiResponse handle_api(Service &service, const ApiRequest &request);

class ApiServer {
public:
  ApiServer(Service &service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ApiServer();

  // Binds and returns the port (an ephemeral one when `port` is 0), or -1.
  int bind(const std::string &host, int port);
  // Blocks until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

private:
  Service &service_;
  std::unique_ptr<httplib::Server> server_;
};

} // namespace smecs
