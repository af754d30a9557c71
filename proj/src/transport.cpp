#include "smecs/transport.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "smecs/error.hpp"
#include "smecs/text.hpp"

namespace smecs {

namespace {

std::atomic<long> g_network_instances{0};

std::optional<std::string> slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const std::string *find_header(const std::vector<std::pair<std::string, std::string>> &headers,
                               std::string_view name) {
  std::string wanted = text::lower(name);
  for (const auto &[key, value] : headers)
    if (text::lower(key) == wanted)
      return &value;
  return nullptr;
}

} // namespace

const std::string *HttpRequest::header(std::string_view name) const {
  return find_header(headers, name);
}

const std::string *HttpResponse::header(std::string_view name) const {
  auto it = headers.find(text::lower(name));
  return it == headers.end() ? nullptr : &it->second;
}

std::string request_path(std::string_view url) {
  std::string_view rest = url;
  if (auto scheme = rest.find("://"); scheme != std::string_view::npos) {
    rest.remove_prefix(scheme + 3);
    auto slash = rest.find('/');
    rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash);
  }
  rest = rest.substr(0, rest.find_first_of("?#"));
  return std::string(rest.empty() ? "/" : rest);
}

FixtureTransport::FixtureTransport(std::filesystem::path root) : root_(std::move(root)) {}

HttpResponse FixtureTransport::get(const HttpRequest &request) {
  {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
  }
  std::string path = request_path(request.url);
  while (!path.empty() && path.front() == '/')
    path.erase(path.begin());
  if (path.find("..") != std::string::npos)
    throw Error(ErrorCode::TransportError, "fixture path escapes the fixture root");

  std::filesystem::path base = root_ / path;
  auto body = slurp(base.string() + ".json");
  auto meta_text = slurp(base.string() + ".meta.json");

  HttpResponse response;
  response.status = body ? 200 : 404;
  if (body)
    response.body = std::move(*body);
  else
    response.body = R"({"message":"Not Found"})";

  if (meta_text) {
    auto meta = nlohmann::json::parse(*meta_text, nullptr, false);
    if (meta.is_discarded() || !meta.is_object())
      throw Error(ErrorCode::TransportError, "unreadable fixture metadata for " + path);
    response.status = meta.value("status", response.status);
    if (meta.contains("body") && meta["body"].is_string())
      response.body = meta["body"].get<std::string>();
    if (meta.contains("headers") && meta["headers"].is_object())
      for (const auto &[key, value] : meta["headers"].items())
        response.headers[text::lower(key)] =
            value.is_string() ? value.get<std::string>() : value.dump();
    if (meta.value("transport_failure", false))
      throw Error(ErrorCode::TransportError, "connection reset while fetching " + path);
  }
  return response;
}

std::vector<HttpRequest> FixtureTransport::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

NetworkTransport::NetworkTransport(int timeout_seconds) : timeout_seconds_(timeout_seconds) {
  ++g_network_instances;
}

long NetworkTransport::instances() { return g_network_instances.load(); }

HttpResponse NetworkTransport::get(const HttpRequest &request) {
  auto scheme_end = request.url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::TransportError, "not an absolute URL: " + request.url);
  auto path_start = request.url.find('/', scheme_end + 3);
  std::string origin = request.url.substr(0, path_start);
  std::string target = path_start == std::string::npos ? "/" : request.url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_follow_location(true);

  httplib::Headers headers;
  for (const auto &[key, value] : request.headers)
    headers.emplace(key, value);

  auto result = client.Get(target, headers);
  if (!result)
    throw Error(ErrorCode::TransportError,
                "request to " + origin + " failed: " + httplib::to_string(result.error()));

  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto &[key, value] : result->headers)
    response.headers[text::lower(key)] = value;
  return response;
}

} // namespace smecs
