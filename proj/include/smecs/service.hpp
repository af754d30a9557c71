#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "smecs/crosswalk.hpp"
#include "smecs/harvest.hpp"
#include "smecs/merge.hpp"
#include "smecs/model.hpp"
#include "smecs/vocab.hpp"

namespace smecs {

using Clock = std::chrono::system_clock;

struct ServiceConfig {
  std::optional<std::string> default_token;
  Precedence precedence = default_precedence();
  std::set<Field> review_fields = default_review_fields();
  std::optional<std::filesystem::path> session_dir;
  std::chrono::seconds ttl = std::chrono::hours(24);
  CrosswalkTables crosswalk;
  std::function<Clock::time_point()> now = [] { return Clock::now(); };
};

// Reads the service configuration file:
//   {"default_token_env": "SMECS_DEFAULT_TOKEN", "precedence": [...],
//    "review_fields": [...], "session_dir": "...", "ttl_hours": 24,
//    "crosswalk": {"github": "file.json", "cff": "file.json"}}
// Relative paths resolve against the file's directory. The default token is
// always taken from the environment, never from the file.
ServiceConfig load_service_config(const std::filesystem::path &file);

struct Session {
  std::string id;
  std::optional<RepoLocator> locator;
  CodeMetaRecord record;
  ProvenanceMap provenance;
  StatusMap statuses;
  std::set<Field> edits;
  std::vector<SourceReport> report;
  std::vector<Violation> violations;
  Clock::time_point created_at;
  Clock::time_point modified_at;
};

// View served by the HTTP API; also the on-disk session format.
Json session_to_json(const Session &session);
Session session_from_json(const Json &doc);

class SessionStore {
public:
  SessionStore(std::optional<std::filesystem::path> dir, std::chrono::seconds ttl,
               std::function<Clock::time_point()> now);

  void put(const Session &session);
  // Throws Error(UnknownSession).
  Session get(const std::string &id);
  // Runs `edit` on the stored session while holding that session's lock and
  // persists the result.
  Session mutate(const std::string &id, const std::function<void(Session &)> &edit);
  void purge_expired();
  std::size_t size() const;

private:
  struct Slot {
    std::mutex mutex;
    Session session;
    Clock::time_point last_access;
  };

  std::shared_ptr<Slot> find(const std::string &id);
  void persist(const Session &session) const;
  void forget(const std::string &id);
  void load_directory();

  std::optional<std::filesystem::path> dir_;
  std::chrono::seconds ttl_;
  std::function<Clock::time_point()> now_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Slot>> slots_;
};

class Service {
public:
  Service(ServiceConfig config, VocabularySet vocab, std::shared_ptr<HttpTransport> transport);

  // Start and extraction phases: harvest, crosswalk, merge, classify.
  Session create_session(std::string_view url, std::optional<std::string> token);
  Session get_session(const std::string &id);

  // Paths: a schema field name ("description", "keywords", ...), or a person
  // operation: "persons/add", "persons/<i>", "persons/<i>/remove",
  // "persons/<i>/roles", "persons/<i>/<attribute>".
  Session update_field(const std::string &id, const std::string &path, const Json &value);

  std::string export_session(const std::string &id);

  // New session from a CodeMeta document, or overlay onto an existing one.
  Session import_metadata(const std::optional<std::string> &id, std::string_view codemeta_text);

  const VocabularySet &vocab() const { return vocab_; }
  const ServiceConfig &config() const { return config_; }
  SessionStore &store() { return store_; }

private:
  void refresh(Session &session) const;
  Clock::time_point tick(Clock::time_point previous) const;

  ServiceConfig config_;
  VocabularySet vocab_;
  std::shared_ptr<HttpTransport> transport_;
  SessionStore store_;
};

} // namespace smecs
