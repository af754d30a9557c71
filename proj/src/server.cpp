#include "smecs/server.hpp"

#include <charconv>

#include <httplib.h>

#include "smecs/log.hpp"
#include "smecs/text.hpp"

namespace smecs {

namespace {

ApiResponse json_response(int status, const Json &body) {
  ApiResponse response;
  response.status = status;
  response.body = body.dump(-1, ' ', false, Json::error_handler_t::replace);
  return response;
}

ApiResponse error_response(const Error &error) {
  ApiResponse response = json_response(http_status(error.code()),
                                       {{"error", error_slug(error.code())},
                                        {"code", std::string(to_string(error.code()))},
                                        {"detail", error.what()}});
  if (error.retry_after())
    response.headers["Retry-After"] = std::to_string(*error.retry_after());
  return response;
}

Json parse_body(const std::string &body) {
  Json doc = Json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error(ErrorCode::MalformedJson, "request body must be a JSON object");
  return doc;
}

std::optional<std::string> optional_text(const Json &doc, const char *key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null())
    return std::nullopt;
  if (!it->is_string())
    throw Error(ErrorCode::MalformedJson, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

ApiResponse route_not_found(const ApiRequest &request) {
  ApiResponse response = json_response(404, {{"error", "no-route"},
                                             {"code", "NotFound"},
                                             {"detail", request.method + " " + request.path}});
  return response;
}

ApiResponse vocab_lookup(const Service &service, const std::string &which,
                         const ApiRequest &request) {
  const Vocabulary *vocab = which == "licenses"    ? &service.vocab().licenses
                            : which == "languages" ? &service.vocab().languages
                                                   : nullptr;
  if (!vocab)
    return route_not_found(request);
  std::size_t limit = 20;
  if (auto it = request.query.find("limit"); it != request.query.end()) {
    const auto &raw = it->second;
    auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), limit);
    if (ec != std::errc() || end != raw.data() + raw.size())
      throw Error(ErrorCode::MalformedJson, "limit must be a non-negative integer");
  }
  auto q = request.query.find("q");
  Json out = Json::array();
  for (const auto &entry : filter_vocabulary(*vocab, q == request.query.end() ? "" : q->second, limit))
    out.push_back({{"id", entry.id}, {"label", entry.label}});
  return json_response(200, out);
}

ApiResponse dispatch(Service &service, const ApiRequest &request) {
  auto parts = text::split(request.path, '/');
  std::vector<std::string> segments;
  for (auto &part : parts)
    if (!part.empty())
      segments.push_back(std::move(part));
  if (segments.empty() || segments[0] != "api")
    return route_not_found(request);
  segments.erase(segments.begin());
  const std::string &method = request.method;

  if (segments == std::vector<std::string>{"health"} && method == "GET")
    return json_response(200, {{"status", "ok"}, {"sessions", service.store().size()}});

  if (segments.size() == 2 && segments[0] == "vocab" && method == "GET")
    return vocab_lookup(service, segments[1], request);

  if (segments.empty() || segments[0] != "sessions")
    return route_not_found(request);

  if (segments.size() == 1 && method == "POST") {
    Json body = parse_body(request.body);
    auto url = optional_text(body, "url");
    if (!url)
      throw Error(ErrorCode::UnsupportedUrl, "request needs a repository 'url'");
    return json_response(201, session_to_json(service.create_session(*url, optional_text(body, "token"))));
  }
  if (segments.size() == 2 && segments[1] == "import" && method == "POST") {
    std::optional<std::string> id;
    if (auto it = request.query.find("session"); it != request.query.end() && !it->second.empty())
      id = it->second;
    Session session = service.import_metadata(id, request.body);
    return json_response(id ? 200 : 201, session_to_json(session));
  }
  if (segments.size() == 2 && method == "GET")
    return json_response(200, session_to_json(service.get_session(segments[1])));
  if (segments.size() == 3 && segments[2] == "fields" && method == "PATCH") {
    Json body = parse_body(request.body);
    auto path = optional_text(body, "path");
    if (!path)
      throw Error(ErrorCode::UnknownField, "request needs a field 'path'");
    Json value = body.contains("value") ? body["value"] : Json();
    return json_response(200, session_to_json(service.update_field(segments[1], *path, value)));
  }
  if (segments.size() == 3 && segments[2] == "export" && method == "GET") {
    ApiResponse response;
    response.body = service.export_session(segments[1]);
    response.headers["Content-Disposition"] = "attachment; filename=\"codemeta.json\"";
    return response;
  }
  return route_not_found(request);
}

} // namespace

int http_status(ErrorCode code) {
  switch (code) {
  case ErrorCode::AuthError: return 401;
  case ErrorCode::NotFound:
  case ErrorCode::UnknownSession: return 404;
  case ErrorCode::UnknownField:
  case ErrorCode::InvariantViolation:
  case ErrorCode::MissingName: return 422;
  case ErrorCode::RateLimited: return 429;
  case ErrorCode::TransportError:
  case ErrorCode::DecodeError: return 502;
  default: return 400;
  }
}

std::string error_slug(ErrorCode code) {
  std::string name(to_string(code));
  std::string out;
  for (char c : name) {
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (!out.empty())
        out.push_back('-');
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      out.push_back(c);
    }
  }
  return out;
}

ApiResponse handle_api(Service &service, const ApiRequest &request) {
  try {
    return dispatch(service, request);
  } catch (const Error &e) {
    return error_response(e);
  } catch (const std::exception &e) {
    logger()->error("unhandled error on {} {}: {}", request.method, request.path, e.what());
    return json_response(500, {{"error", "internal"}, {"code", "Internal"}, {"detail", "internal error"}});
  }
}

ApiServer::ApiServer(Service &service, std::optional<std::filesystem::path> static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto bridge = [this](const httplib::Request &req, httplib::Response &res) {
    ApiRequest request{req.method, req.path, {}, req.body};
    for (const auto &[key, value] : req.params)
      request.query.emplace(key, value);
    ApiResponse response = handle_api(service_, request);
    res.status = response.status;
    for (const auto &[key, value] : response.headers)
      res.set_header(key, value);
    res.set_content(response.body, response.content_type);
  };
  const char *pattern = R"(/api/.*)";
  server_->Get(pattern, bridge);
  server_->Post(pattern, bridge);
  server_->Patch(pattern, bridge);
  if (static_dir && !server_->set_mount_point("/", static_dir->string()))
    logger()->warn("static directory {} not found", static_dir->string());
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string &host, int port) {
  if (port == 0)
    return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_)
    server_->stop();
}

void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

} // namespace smecs
