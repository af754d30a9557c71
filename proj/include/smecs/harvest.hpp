#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smecs/model.hpp"
#include "smecs/transport.hpp"

namespace smecs {

struct RepoLocator {
  std::string host;
  std::string owner;
  std::string name;

  std::string html_url() const { return "https://" + host + "/" + owner + "/" + name; }
  bool operator==(const RepoLocator &) const = default;
};

// Accepts https URLs with an optional ".git" suffix and trailing slash.
// Throws Error(UnsupportedUrl).
RepoLocator parse_repo_url(std::string_view url);

enum class TokenOrigin { None, UserProvided, ServerDefault };

class AuthToken {
public:
  AuthToken() = default;
  AuthToken(std::string value, TokenOrigin origin)
      : value_(std::move(value)), origin_(value_.empty() ? TokenOrigin::None : origin) {}

  // User token if non-empty, else the server default, else none.
  static AuthToken resolve(std::optional<std::string> user,
                           std::optional<std::string> server_default);

  TokenOrigin origin() const { return origin_; }
  bool present() const { return origin_ != TokenOrigin::None; }
  const std::string &reveal() const { return value_; }

  // Replaces every occurrence of the token in `text`.
  std::string redact(std::string text) const;

private:
  std::string value_;
  TokenOrigin origin_ = TokenOrigin::None;
};

enum class SourceKind { GitHubApi, CffFile, CodeMetaFile };

std::string_view to_string(SourceKind kind);
std::optional<SourceKind> source_kind_from_name(std::string_view name);

// Raw harvested data, before any crosswalk.
struct SourceRecord {
  SourceKind source = SourceKind::GitHubApi;
  Json data = Json::object();
  std::vector<std::string> warnings;
};

inline constexpr std::string_view kWarningMissingCffVersion = "missing-cff-version";

// API root for a hosting platform, e.g. https://api.github.com.
std::string api_base(const RepoLocator &locator);

// GET /repos/{owner}/{name}, /languages and /contributors combined under
// "repo", "languages" and "contributors".
SourceRecord harvest_api(const RepoLocator &locator, const AuthToken &token,
                         HttpTransport &transport);

// Reads a file from the repository root on the default branch via the
// contents endpoint. Returns nullopt when the file does not exist.
std::optional<std::string> fetch_repo_file(const RepoLocator &locator,
                                           const AuthToken &token,
                                           HttpTransport &transport,
                                           std::string_view path);

// YAML-subset reader for CITATION.cff. Throws Error(MalformedCff) with a line
// number on structural errors.
SourceRecord parse_cff(std::string_view text);

enum class HarvestOutcome { Harvested, Absent, Failed };

std::string_view to_string(HarvestOutcome outcome);

struct SourceReport {
  SourceKind source;
  HarvestOutcome outcome;
  std::string detail;
};

struct HarvestResult {
  // Always in the order GitHubApi, CffFile, CodeMetaFile (absent ones skipped).
  std::vector<SourceRecord> records;
  std::vector<SourceReport> report;
};

// Runs the three harvesters concurrently. A failing API harvest aborts with
// its error; file harvesters degrade to absent/failed in the report.
HarvestResult harvest_all(const RepoLocator &locator, const AuthToken &token,
                          HttpTransport &transport);

std::string base64_decode(std::string_view encoded);

} // namespace smecs
