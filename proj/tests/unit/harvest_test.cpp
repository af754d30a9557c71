#include <catch_amalgamated.hpp>

#include <random>

#include "smecs/error.hpp"
#include "smecs/harvest.hpp"

using namespace smecs;

namespace {

struct Failure {
  ErrorCode code;
  std::string message;
  std::optional<long> retry_after;
};

Failure harvest_failure(const std::string &repo, const AuthToken &token) {
  FixtureTransport transport(SMECS_TEST_FIXTURES);
  try {
    harvest_all(parse_repo_url("https://github.com/acme/" + repo), token, transport);
  } catch (const Error &e) {
    return {e.code(), e.what(), e.retry_after()};
  }
  FAIL("expected harvest of " << repo << " to fail");
  return {};
}

// Serves canned responses and records every request.
class EchoTransport final : public HttpTransport {
public:
  explicit EchoTransport(HttpResponse reply) : reply_(std::move(reply)) {}
  HttpResponse get(const HttpRequest &request) override {
    seen.push_back(request);
    return reply_;
  }
  std::vector<HttpRequest> seen;

private:
  HttpResponse reply_;
};

} // namespace

TEST_CASE("repository URLs") {
  auto loc = parse_repo_url("https://GitHub.com/acme/demo.git/");
  CHECK(loc == RepoLocator{"github.com", "acme", "demo"});
  CHECK(loc.html_url() == "https://github.com/acme/demo");
  CHECK(parse_repo_url("https://github.com/acme/demo/tree/main").name == "demo");
  CHECK(parse_repo_url("https://ghe.example.org/team/tool?tab=readme").host == "ghe.example.org");
  CHECK(api_base(loc) == "https://api.github.com");
  for (const char *bad : {"ftp://x", "http://github.com/a/b", "https://github.com/acme",
                          "github.com/a/b", "", "https://github.com/"}) {
    CAPTURE(bad);
    CHECK_THROWS_MATCHES(parse_repo_url(bad), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error &e) { return e.code() == ErrorCode::UnsupportedUrl; }));
  }
}

TEST_CASE("token resolution prefers the user's token") {
  CHECK(AuthToken::resolve("user", "server").origin() == TokenOrigin::UserProvided);
  CHECK(AuthToken::resolve("  ", "server").origin() == TokenOrigin::ServerDefault);
  CHECK(AuthToken::resolve(std::nullopt, std::nullopt).origin() == TokenOrigin::None);
  CHECK_FALSE(AuthToken::resolve("", "").present());
  AuthToken t("s3cr3t", TokenOrigin::UserProvided);
  CHECK(t.redact("Bearer s3cr3t and s3cr3t") == "Bearer [redacted] and [redacted]");
}

TEST_CASE("requests carry the API headers and bearer token") {
  FixtureTransport transport(SMECS_TEST_FIXTURES);
  AuthToken token("ghp_example", TokenOrigin::UserProvided);
  harvest_all(parse_repo_url("https://github.com/acme/demo"), token, transport);
  auto requests = transport.requests();
  REQUIRE(requests.size() == 5);
  std::set<std::string> paths;
  for (const auto &r : requests) {
    paths.insert(request_path(r.url));
    REQUIRE(r.header("accept"));
    CHECK(*r.header("Accept") == "application/vnd.github+json");
    CHECK(*r.header("User-Agent") == "smecs");
    CHECK(*r.header("Authorization") == "Bearer ghp_example");
  }
  CHECK(paths == std::set<std::string>{"/repos/acme/demo", "/repos/acme/demo/languages",
                                       "/repos/acme/demo/contributors",
                                       "/repos/acme/demo/contents/CITATION.cff",
                                       "/repos/acme/demo/contents/codemeta.json"});
}

TEST_CASE("anonymous requests send no Authorization header") {
  FixtureTransport transport(SMECS_TEST_FIXTURES);
  harvest_api(parse_repo_url("https://github.com/acme/apionly"), {}, transport);
  for (const auto &r : transport.requests())
    CHECK_FALSE(r.header("Authorization"));
}

TEST_CASE("demo repository yields three sources in fixed order") {
  FixtureTransport transport(SMECS_TEST_FIXTURES);
  auto result = harvest_all(parse_repo_url("https://github.com/acme/demo"), {}, transport);
  REQUIRE(result.records.size() == 3);
  CHECK(result.records[0].source == SourceKind::GitHubApi);
  CHECK(result.records[1].source == SourceKind::CffFile);
  CHECK(result.records[2].source == SourceKind::CodeMetaFile);
  CHECK(result.records[0].data["repo"]["name"] == "demo");
  CHECK(result.records[0].data["languages"]["Python"] == 12000);
  CHECK(result.records[1].data["title"] == "Demo Toolkit");
  CHECK(result.records[2].data["developmentStatus"] == "active");
  for (const auto &entry : result.report)
    CHECK(entry.outcome == HarvestOutcome::Harvested);
}

TEST_CASE("missing files are reported absent, broken ones failed") {
  FixtureTransport transport(SMECS_TEST_FIXTURES);
  auto api_only = harvest_all(parse_repo_url("https://github.com/acme/apionly"), {}, transport);
  CHECK(api_only.records.size() == 1);
  CHECK(api_only.report[1].outcome == HarvestOutcome::Absent);
  CHECK(api_only.report[2].outcome == HarvestOutcome::Absent);

  auto noassert = harvest_all(parse_repo_url("https://github.com/acme/noassert"), {}, transport);
  REQUIRE(noassert.records.size() == 2);
  CHECK(noassert.records[1].warnings == std::vector<std::string>{std::string(kWarningMissingCffVersion)});
  CHECK(noassert.report[2].outcome == HarvestOutcome::Failed);

  auto bad = harvest_all(parse_repo_url("https://github.com/acme/badbase64"), {}, transport);
  CHECK(bad.report[1].outcome == HarvestOutcome::Failed);
  CHECK(bad.report[1].detail.find("base64") != std::string::npos);
}

TEST_CASE("API failures map to error codes") {
  AuthToken none;
  CHECK(harvest_failure("nothere", none).code == ErrorCode::NotFound);
  CHECK(harvest_failure("private", none).code == ErrorCode::AuthError);
  CHECK(harvest_failure("forbidden", none).code == ErrorCode::AuthError);
  auto limited = harvest_failure("limited", none);
  CHECK(limited.code == ErrorCode::RateLimited);
  CHECK(limited.retry_after == 60);
  CHECK(harvest_failure("broken", none).code == ErrorCode::TransportError);
  CHECK(harvest_failure("garbled", none).code == ErrorCode::DecodeError);
  CHECK(harvest_failure("offline", none).code == ErrorCode::TransportError);
}

TEST_CASE("429 and rate-limit bodies are rate limits") {
  HttpResponse too_many{429, "{}", {{"retry-after", "7"}}};
  EchoTransport t1(too_many);
  try {
    harvest_api(parse_repo_url("https://github.com/a/b"), {}, t1);
    FAIL("expected RateLimited");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::RateLimited);
    CHECK(e.retry_after() == 7);
  }
  HttpResponse secondary{403, R"({"message":"You have exceeded a secondary rate limit"})", {}};
  EchoTransport t2(secondary);
  CHECK_THROWS_MATCHES(harvest_api(parse_repo_url("https://github.com/a/b"), {}, t2), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error &e) { return e.code() == ErrorCode::RateLimited; }));
}

TEST_CASE("the token never leaks into errors, even when echoed back") {
  std::mt19937 rng(5);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
  for (int i = 0; i < 100; ++i) {
    std::string secret = "ghp_";
    for (int k = 0; k < 20; ++k)
      secret += alphabet[rng() % alphabet.size()];
    AuthToken token(secret, TokenOrigin::UserProvided);
    for (const char *repo : {"nothere", "private", "limited", "forbidden", "broken", "garbled", "offline"})
      CHECK(harvest_failure(repo, token).message.find(secret) == std::string::npos);

    // A hostile upstream that reflects the credential in its status line body.
    HttpResponse reflect{500, "token " + secret, {}};
    EchoTransport echo(reflect);
    try {
      harvest_api(parse_repo_url("https://github.com/a/b"), token, echo);
    } catch (const std::exception &e) {
      CHECK(std::string(e.what()).find(secret) == std::string::npos);
    }
  }
}

TEST_CASE("base64 decoding") {
  CHECK(base64_decode("aGVsbG8=") == "hello");
  CHECK(base64_decode("aGVs\nbG8h") == "hello!");
  CHECK(base64_decode("") == "");
  CHECK_THROWS_AS(base64_decode("@@@@"), Error);
  CHECK_THROWS_AS(base64_decode("aGVsbG8"), Error);
}

TEST_CASE("fixture transport answers 404 for unknown paths and strips queries") {
  FixtureTransport transport(SMECS_TEST_FIXTURES);
  CHECK(transport.get({"https://api.github.com/repos/acme/zzz", {}}).status == 404);
  auto r = transport.get({"https://api.github.com/repos/acme/demo/contributors?per_page=100", {}});
  CHECK(r.status == 200);
  CHECK_THROWS_AS(transport.get({"https://api.github.com/../../etc/passwd", {}}), Error);
  CHECK(request_path("https://api.github.com/repos/a/b?x=1#f") == "/repos/a/b");
}
