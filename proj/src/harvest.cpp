#include "smecs/harvest.hpp"

#include <array>
#include <chrono>
#include <future>

#include "smecs/error.hpp"
#include "smecs/log.hpp"
#include "smecs/text.hpp"

namespace smecs {

namespace {

constexpr std::string_view kAcceptHeader = "application/vnd.github+json";
constexpr std::string_view kUserAgent = "smecs";

HttpRequest api_request(const std::string &url, const AuthToken &token) {
  HttpRequest request{url, {}};
  request.headers.emplace_back("Accept", kAcceptHeader);
  request.headers.emplace_back("User-Agent", kUserAgent);
  if (token.present())
    request.headers.emplace_back("Authorization", "Bearer " + token.reveal());
  return request;
}

bool has_rate_limit_marker(const HttpResponse &response) {
  if (const auto *remaining = response.header("x-ratelimit-remaining"); remaining && *remaining == "0")
    return true;
  return text::lower(response.body).find("rate limit") != std::string::npos;
}

std::optional<long> retry_after_seconds(const HttpResponse &response) {
  try {
    if (const auto *retry = response.header("retry-after"))
      return std::stol(*retry);
    if (const auto *reset = response.header("x-ratelimit-reset")) {
      auto now = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::system_clock::now().time_since_epoch())
                     .count();
      return std::max(0L, std::stol(*reset) - static_cast<long>(now));
    }
  } catch (const std::exception &) {
  }
  return std::nullopt;
}

// Maps a non-success status to the matching error. `what` names the
// resource for the message.
[[noreturn]] void raise_for_status(const HttpResponse &response, const std::string &what,
                                   const AuthToken &token) {
  int status = response.status;
  auto fail = [&token](ErrorCode code, const std::string &message) -> Error {
    Error error(code, token.redact(message));
    logger()->warn("{}", error.what());
    return error;
  };

  if (status == 429 || (status == 403 && has_rate_limit_marker(response))) {
    auto retry = retry_after_seconds(response);
    std::string message = "API rate limit exceeded while fetching " + what;
    if (retry)
      message += "; retry after " + std::to_string(*retry) + " s";
    if (!token.present())
      message += "; a personal access token raises the limit";
    throw fail(ErrorCode::RateLimited, message).with_retry_after(retry);
  }
  if (status == 401 || status == 403) {
    std::string message =
        token.present()
            ? "access to " + what + " was refused (HTTP " + std::to_string(status) +
                  "); check that the access token is valid and has read access"
            : "access to " + what + " requires authentication (HTTP " + std::to_string(status) +
                  "); provide a personal access token";
    throw fail(ErrorCode::AuthError, message);
  }
  if (status == 404)
    throw fail(ErrorCode::NotFound, what + " not found");
  throw fail(ErrorCode::TransportError,
             "unexpected HTTP status " + std::to_string(status) + " for " + what);
}

// GET returning parsed JSON; nullopt on 404 when `missing_ok`.
std::optional<Json> get_json(HttpTransport &transport, const std::string &url,
                             const std::string &what, const AuthToken &token, bool missing_ok) {
  logger()->debug("GET {}", url);
  HttpResponse response;
  try {
    response = transport.get(api_request(url, token));
  } catch (const Error &e) {
    throw Error(e.code(), token.redact(e.what()));
  } catch (const std::exception &e) {
    throw Error(ErrorCode::TransportError, token.redact(e.what()));
  }
  if (response.status == 204)
    return Json();
  if (response.status == 404 && missing_ok)
    return std::nullopt;
  if (response.status < 200 || response.status >= 300)
    raise_for_status(response, what, token);
  Json body = Json::parse(response.body, nullptr, false);
  if (body.is_discarded())
    throw Error(ErrorCode::DecodeError, "response for " + what + " is not valid JSON");
  return body;
}

} // namespace

RepoLocator parse_repo_url(std::string_view url) {
  std::string_view raw = text::trim(url);
  auto reject = [&raw](const std::string &why) -> Error {
    return Error(ErrorCode::UnsupportedUrl,
                 "unsupported repository URL '" + std::string(raw) + "': " + why);
  };
  constexpr std::string_view kScheme = "https://";
  if (!text::starts_with_icase(raw, kScheme))
    throw reject("expected https://<host>/<owner>/<name>");

  std::string_view rest = raw.substr(kScheme.size());
  rest = rest.substr(0, rest.find_first_of("?#"));
  auto parts = text::split(rest, '/');
  std::vector<std::string> segments;
  for (auto &part : parts)
    if (!part.empty())
      segments.push_back(std::move(part));
  if (segments.size() < 3)
    throw reject("expected an owner and a repository name");

  RepoLocator locator{text::lower(segments[0]), segments[1], segments[2]};
  if (locator.name.size() >= 4 && text::lower(locator.name.substr(locator.name.size() - 4)) == ".git")
    locator.name.resize(locator.name.size() - 4);
  if (locator.host.find('@') != std::string::npos || locator.name.empty())
    throw reject("expected https://<host>/<owner>/<name>");
  return locator;
}

AuthToken AuthToken::resolve(std::optional<std::string> user,
                             std::optional<std::string> server_default) {
  if (user && !text::trim(*user).empty())
    return AuthToken(std::string(text::trim(*user)), TokenOrigin::UserProvided);
  if (server_default && !text::trim(*server_default).empty())
    return AuthToken(std::string(text::trim(*server_default)), TokenOrigin::ServerDefault);
  return {};
}

std::string AuthToken::redact(std::string text) const {
  if (!value_.empty())
    text::replace_all(text, value_, "[redacted]");
  return text;
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
  case SourceKind::GitHubApi: return "GitHubApi";
  case SourceKind::CffFile: return "CffFile";
  case SourceKind::CodeMetaFile: return "CodeMetaFile";
  }
  return "GitHubApi";
}

std::optional<SourceKind> source_kind_from_name(std::string_view name) {
  for (SourceKind kind : {SourceKind::GitHubApi, SourceKind::CffFile, SourceKind::CodeMetaFile})
    if (to_string(kind) == name)
      return kind;
  return std::nullopt;
}

std::string_view to_string(HarvestOutcome outcome) {
  switch (outcome) {
  case HarvestOutcome::Harvested: return "harvested";
  case HarvestOutcome::Absent: return "absent";
  case HarvestOutcome::Failed: return "failed";
  }
  return "failed";
}

std::string api_base(const RepoLocator &locator) { return "https://api." + locator.host; }

SourceRecord harvest_api(const RepoLocator &locator, const AuthToken &token,
                         HttpTransport &transport) {
  std::string repo_url = api_base(locator) + "/repos/" + locator.owner + "/" + locator.name;
  std::string label = "repository " + locator.owner + "/" + locator.name;

  SourceRecord record{SourceKind::GitHubApi, Json::object(), {}};
  record.data["repo"] = *get_json(transport, repo_url, label, token, false);
  auto languages = get_json(transport, repo_url + "/languages", label + " languages", token, true);
  record.data["languages"] = languages && languages->is_object() ? *languages : Json::object();
  auto contributors = get_json(transport, repo_url + "/contributors?per_page=100",
                               label + " contributors", token, true);
  record.data["contributors"] =
      contributors && contributors->is_array() ? *contributors : Json::array();
  return record;
}

std::string base64_decode(std::string_view encoded) {
  static const auto table = [] {
    std::array<int, 256> t{};
    t.fill(-1);
    const std::string_view alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      t[static_cast<unsigned char>(alphabet[i])] = static_cast<int>(i);
    return t;
  }();

  std::string out;
  unsigned buffer = 0;
  int bits = 0;
  std::size_t symbols = 0;
  std::size_t padding = 0;
  for (char c : encoded) {
    if (c == '\n' || c == '\r' || c == ' ' || c == '\t')
      continue;
    if (c == '=') {
      ++padding;
      ++symbols;
      continue;
    }
    int value = table[static_cast<unsigned char>(c)];
    if (value < 0 || padding > 0)
      throw Error(ErrorCode::DecodeError, "invalid base64 content");
    buffer = (buffer << 6) | static_cast<unsigned>(value);
    bits += 6;
    ++symbols;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
    }
  }
  if (symbols % 4 != 0 || padding > 2)
    throw Error(ErrorCode::DecodeError, "truncated base64 content");
  return out;
}

std::optional<std::string> fetch_repo_file(const RepoLocator &locator, const AuthToken &token,
                                           HttpTransport &transport, std::string_view path) {
  std::string url = api_base(locator) + "/repos/" + locator.owner + "/" + locator.name +
                    "/contents/" + std::string(path);
  std::string label = std::string(path) + " in " + locator.owner + "/" + locator.name;
  auto body = get_json(transport, url, label, token, true);
  if (!body)
    return std::nullopt;
  if (!body->is_object() || !body->contains("content") || !(*body)["content"].is_string())
    throw Error(ErrorCode::DecodeError, label + ": response carries no file content");
  std::string encoding = body->value("encoding", std::string("base64"));
  if (encoding != "base64")
    throw Error(ErrorCode::DecodeError, label + ": unsupported content encoding '" + encoding + "'");
  try {
    return base64_decode((*body)["content"].get<std::string>());
  } catch (const Error &e) {
    throw Error(ErrorCode::DecodeError, label + ": " + e.what());
  }
}

namespace {

struct FileHarvest {
  std::optional<SourceRecord> record;
  SourceReport report;
};

template <typename Parse>
FileHarvest harvest_file(const RepoLocator &locator, const AuthToken &token,
                         HttpTransport &transport, SourceKind kind, std::string_view path,
                         Parse parse) {
  try {
    auto text = fetch_repo_file(locator, token, transport, path);
    if (!text)
      return {std::nullopt, {kind, HarvestOutcome::Absent, std::string(path) + " not found"}};
    return {parse(*text), {kind, HarvestOutcome::Harvested, std::string(path)}};
  } catch (const std::exception &e) {
    return {std::nullopt, {kind, HarvestOutcome::Failed, token.redact(e.what())}};
  }
}

} // namespace

HarvestResult harvest_all(const RepoLocator &locator, const AuthToken &token,
                          HttpTransport &transport) {
  auto api = std::async(std::launch::async,
                        [&] { return harvest_api(locator, token, transport); });
  auto cff = std::async(std::launch::async, [&] {
    return harvest_file(locator, token, transport, SourceKind::CffFile, "CITATION.cff",
                        [](const std::string &text) { return parse_cff(text); });
  });
  auto codemeta = std::async(std::launch::async, [&] {
    return harvest_file(locator, token, transport, SourceKind::CodeMetaFile, "codemeta.json",
                        [](const std::string &text) {
                          Json doc = Json::parse(text, nullptr, false);
                          if (doc.is_discarded() || !doc.is_object())
                            throw Error(ErrorCode::MalformedJson,
                                        "codemeta.json is not a JSON object");
                          return SourceRecord{SourceKind::CodeMetaFile, std::move(doc), {}};
                        });
  });

  FileHarvest cff_result = cff.get();
  FileHarvest codemeta_result = codemeta.get();
  SourceRecord api_record = api.get();

  HarvestResult result;
  result.records.push_back(std::move(api_record));
  result.report.push_back({SourceKind::GitHubApi, HarvestOutcome::Harvested, api_base(locator)});
  for (FileHarvest *file : {&cff_result, &codemeta_result}) {
    if (file->record)
      result.records.push_back(std::move(*file->record));
    result.report.push_back(std::move(file->report));
  }
  return result;
}

} // namespace smecs
