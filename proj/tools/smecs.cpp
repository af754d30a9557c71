// smecs: extract, validate, serve, refresh-vocab.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "smecs/error.hpp"
#include "smecs/log.hpp"
#include "smecs/server.hpp"
#include "smecs/service.hpp"
#include "smecs/transport.hpp"
#include "smecs/vocab.hpp"

namespace {

using namespace smecs;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPipeline = 2;
constexpr int kExitUsage = 3;

constexpr const char *kSpdxUrl =
    "https://raw.githubusercontent.com/spdx/license-list-data/main/json/licenses.json";

std::optional<std::string> env(const char *name) {
  const char *value = std::getenv(name);
  if (!value || !*value)
    return std::nullopt;
  return std::string(value);
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content))
    throw std::runtime_error("cannot write " + path.string());
}

std::shared_ptr<HttpTransport> make_transport(const std::string &fixtures) {
  if (!fixtures.empty())
    return std::make_shared<FixtureTransport>(fixtures);
  return std::make_shared<NetworkTransport>();
}

VocabularySet vocab_from(const std::string &dir) {
  return load_vocabulary_dir(dir.empty() ? default_vocabulary_dir() : std::filesystem::path(dir));
}

struct ExtractArgs {
  std::string url;
  std::string token;
  std::string out = "codemeta.json";
  std::string fixtures;
  std::string vocab_dir;
  std::string report;
  bool want_report = false;
};

void print_summary(const Session &session) {
  std::cerr << "sources:\n";
  for (const auto &entry : session.report)
    std::cerr << "  " << to_string(entry.source) << ": " << to_string(entry.outcome)
              << (entry.detail.empty() ? "" : " (" + entry.detail + ")") << "\n";
  std::cerr << "fields:\n";
  for (const auto &[field, status] : session.statuses)
    std::cerr << "  " << field_name(field) << ": " << to_string(status) << "\n";
  for (const auto &v : session.violations)
    std::cerr << "warning: " << v.field << ": " << v.message << " [" << v.rule << "]\n";
}

int cmd_extract(const ExtractArgs &args) {
  std::optional<std::string> token =
      args.token.empty() ? env("SMECS_GITHUB_TOKEN") : std::optional(args.token);
  AuthToken redactor = AuthToken::resolve(token, std::nullopt);
  // Failures are reported once below; keep the library log quiet.
  logger()->set_level(spdlog::level::err);
  try {
    parse_repo_url(args.url);
  } catch (const Error &e) {
    std::cerr << "usage error: " << redactor.redact(e.what()) << "\n"
              << "expected --url https://github.com/<owner>/<name>\n";
    return kExitUsage;
  }
  try {
    Service service(ServiceConfig{}, vocab_from(args.vocab_dir), make_transport(args.fixtures));
    Session session = service.create_session(args.url, token);
    std::string exported = export_codemeta(session.record);
    if (args.out == "-")
      std::cout << exported << std::flush;
    else
      write_file(args.out, exported);
    print_summary(session);
    if (args.want_report && !args.report.empty() && args.report != "-") {
      Json view = session_to_json(session);
      view.erase("id");
      view.erase("createdAt");
      view.erase("modifiedAt");
      write_file(args.report, view.dump(2) + "\n");
    }
    if (args.out != "-")
      std::cerr << "wrote " << args.out << "\n";
    return kExitOk;
  } catch (const std::exception &e) {
    std::cerr << "error: " << redactor.redact(e.what()) << "\n";
    return kExitPipeline;
  }
}

int cmd_validate(const std::string &file, const std::string &vocab_dir) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  std::vector<Violation> violations;
  try {
    CodeMetaRecord record = parse_codemeta(text, &violations);
    auto checked = validate_record(record, vocab_from(vocab_dir));
    violations.insert(violations.end(), checked.begin(), checked.end());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  for (const auto &v : violations)
    std::cout << file << ": " << v.field << ": " << v.message << " [" << v.rule << "]\n";
  if (!violations.empty())
    return kExitInvalid;
  std::cerr << file << ": valid\n";
  return kExitOk;
}

ApiServer *g_server = nullptr;

void on_signal(int) {
  if (g_server)
    g_server->stop();
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string config;
  std::string static_dir;
  std::string session_dir;
  double ttl_hours = 0;
  std::string fixtures;
  std::string vocab_dir;
};

int cmd_serve(const ServeArgs &args) {
  try {
    ServiceConfig config = args.config.empty() ? ServiceConfig{} : load_service_config(args.config);
    if (args.config.empty())
      config.default_token = env("SMECS_DEFAULT_TOKEN");
    if (!args.session_dir.empty())
      config.session_dir = args.session_dir;
    if (args.ttl_hours > 0)
      config.ttl = std::chrono::seconds(static_cast<long long>(args.ttl_hours * 3600));

    Service service(std::move(config), vocab_from(args.vocab_dir), make_transport(args.fixtures));
    std::optional<std::filesystem::path> static_dir;
    if (!args.static_dir.empty())
      static_dir = args.static_dir;
    ApiServer server(service, static_dir);
    int port = server.bind(args.host, args.port);
    if (port < 0) {
      std::cerr << "error: cannot listen on " << args.host << ":" << args.port << "\n";
      return kExitPipeline;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on http://" << args.host << ":" << port << "\n";
    server.listen();
    g_server = nullptr;
    return kExitOk;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
}

struct RefreshArgs {
  std::string licenses_file;
  std::string languages_file;
  std::string languages_url;
  std::string out_dir;
};

std::string download(const std::string &url) {
  NetworkTransport transport;
  HttpResponse response = transport.get({url, {{"User-Agent", "smecs"}}});
  if (response.status != 200)
    throw Error(ErrorCode::TransportError,
                "GET " + url + " answered HTTP " + std::to_string(response.status));
  return response.body;
}

int cmd_refresh_vocab(const RefreshArgs &args) {
  std::filesystem::path out =
      args.out_dir.empty() ? default_vocabulary_dir() : std::filesystem::path(args.out_dir);
  try {
    std::filesystem::create_directories(out);
    std::string licenses =
        args.licenses_file.empty() ? download(kSpdxUrl) : read_file(args.licenses_file);
    Vocabulary parsed = load_vocabulary(VocabularyKind::License, licenses);
    write_file(out / kLicenseSnapshotFile, licenses);
    std::cerr << "licenses: " << parsed.size() << " entries\n";

    std::optional<std::string> languages;
    if (!args.languages_file.empty())
      languages = read_file(args.languages_file);
    else if (!args.languages_url.empty())
      languages = download(args.languages_url);
    if (languages) {
      Vocabulary langs = load_vocabulary(VocabularyKind::Language, *languages);
      Json names = Json::array();
      for (const auto &entry : langs.entries())
        names.push_back(entry.id);
      write_file(out / kLanguageSnapshotFile, names.dump(2) + "\n");
      std::cerr << "languages: " << langs.size() << " entries\n";
    }
    return kExitOk;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Research software metadata extraction and curation"};
  app.require_subcommand(1);

  ExtractArgs extract;
  auto *extract_cmd = app.add_subcommand("extract", "Harvest a repository and write codemeta.json");
  extract_cmd->add_option("--url", extract.url, "Repository URL")->required();
  extract_cmd->add_option("--token", extract.token, "Access token (default: $SMECS_GITHUB_TOKEN)");
  extract_cmd->add_option("--out", extract.out, "Output file, '-' for standard output")
      ->capture_default_str();
  extract_cmd->add_option("--fixtures", extract.fixtures, "Replay recorded API responses from DIR");
  extract_cmd->add_option("--vocab-dir", extract.vocab_dir, "Vocabulary snapshot directory");
  auto *report_opt = extract_cmd
                         ->add_option("--report", extract.report,
                                      "Write the session view (statuses, provenance) to FILE")
                         ->expected(0, 1);

  std::string validate_file;
  std::string validate_vocab;
  auto *validate_cmd = app.add_subcommand("validate", "Check a codemeta.json file");
  validate_cmd->add_option("file", validate_file, "CodeMeta file")->required();
  validate_cmd->add_option("--vocab-dir", validate_vocab, "Vocabulary snapshot directory");

  ServeArgs serve;
  auto *serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port)->capture_default_str();
  serve_cmd->add_option("--config", serve.config, "Service configuration JSON");
  serve_cmd->add_option("--static", serve.static_dir, "Directory served at /");
  serve_cmd->add_option("--session-dir", serve.session_dir, "Persist sessions here");
  serve_cmd->add_option("--ttl-hours", serve.ttl_hours, "Idle session lifetime");
  serve_cmd->add_option("--fixtures", serve.fixtures, "Replay recorded API responses from DIR");
  serve_cmd->add_option("--vocab-dir", serve.vocab_dir, "Vocabulary snapshot directory");

  RefreshArgs refresh;
  auto *refresh_cmd = app.add_subcommand("refresh-vocab", "Rewrite the vocabulary snapshots");
  refresh_cmd->add_option("--licenses-from-file", refresh.licenses_file,
                          "SPDX licenses.json to use instead of downloading");
  refresh_cmd->add_option("--languages-from-file", refresh.languages_file, "Language name list");
  refresh_cmd->add_option("--languages-url", refresh.languages_url, "Download the language list");
  refresh_cmd->add_option("--out-dir", refresh.out_dir, "Snapshot directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*extract_cmd) {
    extract.want_report = report_opt->count() > 0;
    return cmd_extract(extract);
  }
  if (*validate_cmd)
    return cmd_validate(validate_file, validate_vocab);
  if (*serve_cmd)
    return cmd_serve(serve);
  if (*refresh_cmd)
    return cmd_refresh_vocab(refresh);
  return kExitUsage;
}
