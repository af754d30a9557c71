#include "smecs/service.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "smecs/error.hpp"
#include "smecs/log.hpp"
#include "smecs/text.hpp"

namespace smecs {

namespace {

long long to_millis(Clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

Clock::time_point from_millis(long long ms) {
  return Clock::time_point(std::chrono::duration_cast<Clock::duration>(std::chrono::milliseconds(ms)));
}

std::string new_session_id() {
  static std::mutex mutex;
  static std::random_device device;
  std::lock_guard lock(mutex);
  std::ostringstream out;
  out << std::hex;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t word = device();
    out.width(8);
    out.fill('0');
    out << word;
  }
  return out.str();
}

bool valid_session_id(const std::string &id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isxdigit(c); });
}

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::MalformedJson, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

[[noreturn]] void unknown_field(const std::string &path) {
  throw Error(ErrorCode::UnknownField, "unknown field '" + path + "'");
}

std::optional<std::string> text_value(const Json &value, const std::string &path) {
  if (value.is_null())
    return std::nullopt;
  if (!value.is_string())
    throw Error(ErrorCode::InvariantViolation, "'" + path + "' expects text or null");
  std::string trimmed(text::trim(value.get<std::string>()));
  if (trimmed.empty())
    return std::nullopt;
  return trimmed;
}

void set_schema_field(CodeMetaRecord &record, Field field, const Json &value,
                      const std::string &path) {
  if (auto *values = record.list(field)) {
    std::vector<std::string> items;
    if (value.is_null()) {
    } else if (value.is_string()) {
      if (field == Field::Keywords) {
        for (const auto &part : text::split(value.get<std::string>(), ','))
          if (auto t = text::trim(part); !t.empty())
            append_unique(items, std::string(t));
      } else if (auto t = text::trim(value.get<std::string>()); !t.empty()) {
        items.emplace_back(t);
      }
    } else if (value.is_array()) {
      for (const auto &item : value) {
        if (!item.is_string())
          throw Error(ErrorCode::InvariantViolation, "'" + path + "' entries must be text");
        if (auto t = text::trim(item.get<std::string>()); !t.empty())
          append_unique(items, std::string(t));
      }
    } else {
      throw Error(ErrorCode::InvariantViolation, "'" + path + "' expects a list of text");
    }
    *values = std::move(items);
    return;
  }

  auto text = text_value(value, path);
  if (text && field == Field::License)
    text = normalize_license(*text);
  else if (text && is_date_field(field))
    text = normalize_date(*text);
  *record.scalar(field) = std::move(text);
}

void edit_person(Session &session, const std::vector<std::string> &parts, const Json &value,
                 const std::string &path) {
  auto &persons = session.record.persons;
  auto require_valid = [](const Person &p) {
    if (p.roles.empty())
      throw Error(ErrorCode::InvariantViolation,
                  "a person must stay an author, a contributor, or both");
    if (!p.identifiable())
      throw Error(ErrorCode::InvariantViolation,
                  "a person needs a family name, an email or an id");
  };

  if (parts.size() == 2 && parts[1] == "add") {
    Person p = person_from_json(value);
    require_valid(p);
    persons.push_back(std::move(p));
    return;
  }
  if (parts.size() < 2)
    unknown_field(path);

  std::size_t index = 0;
  try {
    std::size_t used = 0;
    index = std::stoul(parts[1], &used);
    if (used != parts[1].size())
      unknown_field(path);
  } catch (const std::logic_error &) {
    unknown_field(path);
  }
  if (index >= persons.size())
    unknown_field(path);

  Person updated = persons[index];
  if (parts.size() == 2) {
    updated = person_from_json(value);
  } else if (parts.size() == 3 && parts[2] == "remove") {
    persons.erase(persons.begin() + static_cast<long>(index));
    return;
  } else if (parts.size() == 3 && parts[2] == "roles") {
    if (!value.is_array())
      throw Error(ErrorCode::InvariantViolation, "roles must be a list");
    updated.roles = person_from_json(Json{{"roles", value}}).roles;
  } else if (parts.size() == 3) {
    const std::string &attribute = parts[2];
    auto text = text_value(value, path);
    if (attribute == "givenName")
      updated.given_name = text;
    else if (attribute == "familyName")
      updated.family_name = text;
    else if (attribute == "email")
      updated.email = text;
    else if (attribute == "id")
      updated.id = text;
    else if (attribute == "affiliation")
      updated.affiliation = text;
    else
      unknown_field(path);
  } else {
    unknown_field(path);
  }
  require_valid(updated);
  persons[index] = std::move(updated);
}

} // namespace

Json session_to_json(const Session &session) {
  Json out = Json::object();
  out["id"] = session.id;
  if (session.locator)
    out["locator"] = {{"host", session.locator->host},
                      {"owner", session.locator->owner},
                      {"name", session.locator->name}};
  else
    out["locator"] = nullptr;
  out["record"] = record_to_json(session.record);

  Json statuses = Json::object();
  for (const auto &[field, status] : session.statuses)
    statuses[std::string(field_name(field))] = std::string(to_string(status));
  out["statuses"] = std::move(statuses);

  Json provenance = {{"fields", Json::object()}, {"persons", Json::object()}};
  for (const auto &[field, source] : session.provenance.fields)
    provenance["fields"][field] = std::string(to_string(source));
  for (const auto &[key, sources] : session.provenance.persons) {
    Json list = Json::array();
    for (SourceKind s : sources)
      list.push_back(std::string(to_string(s)));
    provenance["persons"][key] = std::move(list);
  }
  out["provenance"] = std::move(provenance);

  Json edits = Json::array();
  for (Field f : session.edits)
    edits.push_back(std::string(field_name(f)));
  out["edits"] = std::move(edits);

  Json report = Json::array();
  for (const auto &entry : session.report)
    report.push_back({{"source", std::string(to_string(entry.source))},
                      {"outcome", std::string(to_string(entry.outcome))},
                      {"detail", entry.detail}});
  out["report"] = std::move(report);

  Json violations = Json::array();
  for (const auto &v : session.violations)
    violations.push_back({{"field", v.field}, {"rule", v.rule}, {"message", v.message}});
  out["violations"] = std::move(violations);

  out["createdAt"] = to_millis(session.created_at);
  out["modifiedAt"] = to_millis(session.modified_at);
  return out;
}

Session session_from_json(const Json &doc) {
  Session session;
  try {
    session.id = doc.at("id").get<std::string>();
    if (const auto &loc = doc.at("locator"); loc.is_object())
      session.locator = RepoLocator{loc.at("host").get<std::string>(),
                                    loc.at("owner").get<std::string>(),
                                    loc.at("name").get<std::string>()};
    session.record = record_from_json(doc.at("record"));
    for (const auto &[key, value] : doc.at("provenance").at("fields").items())
      if (auto kind = source_kind_from_name(value.get<std::string>()))
        session.provenance.fields[key] = *kind;
    for (const auto &[key, value] : doc.at("provenance").at("persons").items())
      for (const auto &s : value)
        if (auto kind = source_kind_from_name(s.get<std::string>()))
          session.provenance.persons[key].insert(*kind);
    for (const auto &[key, value] : doc.at("statuses").items()) {
      auto field = field_from_name(key);
      for (CurationStatus status : {CurationStatus::Missing, CurationStatus::Review, CurationStatus::Extracted,
                                    CurationStatus::Edited})
        if (field && value == to_string(status))
          session.statuses[*field] = status;
    }
    for (const auto &e : doc.at("edits"))
      if (auto field = field_from_name(e.get<std::string>()))
        session.edits.insert(*field);
    for (const auto &entry : doc.at("report")) {
      auto kind = source_kind_from_name(entry.at("source").get<std::string>());
      std::string outcome = entry.at("outcome").get<std::string>();
      HarvestOutcome parsed = outcome == "harvested" ? HarvestOutcome::Harvested
                              : outcome == "absent"  ? HarvestOutcome::Absent
                                                     : HarvestOutcome::Failed;
      if (kind)
        session.report.push_back({*kind, parsed, entry.value("detail", std::string())});
    }
    for (const auto &v : doc.at("violations"))
      session.violations.push_back({v.at("field").get<std::string>(),
                                    v.at("rule").get<std::string>(),
                                    v.at("message").get<std::string>()});
    session.created_at = from_millis(doc.at("createdAt").get<long long>());
    session.modified_at = from_millis(doc.at("modifiedAt").get<long long>());
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::MalformedJson, std::string("invalid session document: ") + e.what());
  }
  return session;
}

ServiceConfig load_service_config(const std::filesystem::path &file) {
  Json doc = Json::parse(read_text(file), nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error(ErrorCode::MalformedJson, "configuration " + file.string() + " is not a JSON object");
  auto base = file.parent_path();
  auto resolve = [&base](const std::string &p) {
    std::filesystem::path path(p);
    return path.is_relative() ? base / path : path;
  };

  ServiceConfig config;
  try {
    std::string env_name = doc.value("default_token_env", std::string("SMECS_DEFAULT_TOKEN"));
    if (const char *token = std::getenv(env_name.c_str()); token && *token)
      config.default_token = token;
    if (doc.contains("precedence")) {
      config.precedence.clear();
      for (const auto &name : doc["precedence"]) {
        auto kind = source_kind_from_name(name.get<std::string>());
        if (!kind)
          throw Error(ErrorCode::MalformedJson, "unknown source in precedence: " + name.dump());
        config.precedence.push_back(*kind);
      }
    }
    if (doc.contains("review_fields")) {
      config.review_fields.clear();
      for (const auto &name : doc["review_fields"]) {
        auto field = field_from_name(name.get<std::string>());
        if (!field)
          throw Error(ErrorCode::MalformedJson, "unknown field in review_fields: " + name.dump());
        config.review_fields.insert(*field);
      }
    }
    if (doc.contains("session_dir"))
      config.session_dir = resolve(doc["session_dir"].get<std::string>());
    if (doc.contains("ttl_hours"))
      config.ttl = std::chrono::seconds(
          static_cast<long long>(doc["ttl_hours"].get<double>() * 3600.0));
    if (doc.contains("crosswalk")) {
      const auto &cw = doc["crosswalk"];
      if (cw.contains("github"))
        config.crosswalk.github =
            CrosswalkTable::from_json(read_text(resolve(cw["github"].get<std::string>())));
      if (cw.contains("cff"))
        config.crosswalk.cff =
            CrosswalkTable::from_json(read_text(resolve(cw["cff"].get<std::string>())));
    }
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::MalformedJson, std::string("invalid configuration: ") + e.what());
  }
  return config;
}

SessionStore::SessionStore(std::optional<std::filesystem::path> dir, std::chrono::seconds ttl,
                           std::function<Clock::time_point()> now)
    : dir_(std::move(dir)), ttl_(ttl), now_(std::move(now)) {
  if (dir_) {
    std::filesystem::create_directories(*dir_);
    load_directory();
  }
}

void SessionStore::load_directory() {
  for (const auto &entry : std::filesystem::directory_iterator(*dir_)) {
    if (entry.path().extension() != ".json")
      continue;
    try {
      Session session = session_from_json(Json::parse(read_text(entry.path())));
      // The id names the file the session is written back to.
      if (!valid_session_id(session.id) || entry.path().stem() != session.id)
        throw Error(ErrorCode::MalformedJson, "session id does not match its file name");
      auto slot = std::make_shared<Slot>();
      slot->last_access = session.modified_at;
      slot->session = std::move(session);
      slots_[slot->session.id] = slot;
    } catch (const std::exception &e) {
      logger()->warn("skipping session file {}: {}", entry.path().string(), e.what());
    }
  }
}

void SessionStore::persist(const Session &session) const {
  if (!dir_)
    return;
  auto target = *dir_ / (session.id + ".json");
  auto temp = *dir_ / (session.id + ".json.tmp");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << session_to_json(session).dump(2, ' ', false, Json::error_handler_t::replace) << "\n";
  }
  std::filesystem::rename(temp, target);
}

void SessionStore::forget(const std::string &id) {
  if (!dir_)
    return;
  std::error_code ignored;
  std::filesystem::remove(*dir_ / (id + ".json"), ignored);
}

void SessionStore::put(const Session &session) {
  purge_expired();
  auto slot = std::make_shared<Slot>();
  slot->session = session;
  slot->last_access = now_();
  {
    std::unique_lock lock(mutex_);
    slots_[session.id] = slot;
  }
  std::lock_guard session_lock(slot->mutex);
  persist(slot->session);
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string &id) {
  purge_expired();
  std::shared_lock lock(mutex_);
  auto it = slots_.find(id);
  if (it == slots_.end())
    throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'");
  return it->second;
}

Session SessionStore::get(const std::string &id) {
  auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  slot->last_access = now_();
  return slot->session;
}

Session SessionStore::mutate(const std::string &id, const std::function<void(Session &)> &edit) {
  auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  Session working = slot->session;
  edit(working);
  slot->session = working;
  slot->last_access = now_();
  persist(slot->session);
  return working;
}

void SessionStore::purge_expired() {
  auto now = now_();
  std::vector<std::string> expired;
  {
    std::unique_lock lock(mutex_);
    for (auto it = slots_.begin(); it != slots_.end();) {
      std::unique_lock slot_lock(it->second->mutex, std::try_to_lock);
      if (slot_lock.owns_lock() && now - it->second->last_access > ttl_) {
        expired.push_back(it->first);
        it = slots_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (const auto &id : expired) {
    logger()->info("session {} expired", id);
    forget(id);
  }
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(mutex_);
  return slots_.size();
}

Service::Service(ServiceConfig config, VocabularySet vocab, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), vocab_(std::move(vocab)), transport_(std::move(transport)),
      store_(config_.session_dir, config_.ttl, config_.now) {}

Clock::time_point Service::tick(Clock::time_point previous) const {
  return std::max(previous, config_.now());
}

void Service::refresh(Session &session) const {
  session.statuses =
      classify_fields(session.record, session.provenance, session.edits, config_.review_fields);
  session.violations = validate_record(session.record, vocab_);
}

Session Service::create_session(std::string_view url, std::optional<std::string> token) {
  RepoLocator locator = parse_repo_url(url);
  AuthToken auth = AuthToken::resolve(std::move(token), config_.default_token);

  HarvestResult harvest = harvest_all(locator, auth, *transport_);
  std::vector<PartialRecord> parts;
  for (const auto &source : harvest.records)
    parts.push_back(apply_crosswalk(source, config_.crosswalk));
  MergeResult merged = merge_sources(parts, config_.precedence);

  Session session;
  session.id = new_session_id();
  session.locator = locator;
  session.record = std::move(merged.record);
  session.provenance = std::move(merged.provenance);
  session.report = std::move(harvest.report);
  session.created_at = session.modified_at = config_.now();
  refresh(session);
  store_.put(session);
  logger()->info("session {} created for {}/{}", session.id, locator.owner, locator.name);
  return session;
}

Session Service::get_session(const std::string &id) { return store_.get(id); }

Session Service::update_field(const std::string &id, const std::string &path, const Json &value) {
  return store_.mutate(id, [&](Session &session) {
    auto parts = text::split(path, '/');
    if (parts.front() == "persons" && parts.size() > 1) {
      edit_person(session, parts, value, path);
      std::set<std::string> live;
      for (const Person &p : session.record.persons)
        live.insert(identity_key(p));
      for (auto it = session.provenance.persons.begin(); it != session.provenance.persons.end();)
        it = live.count(it->first) ? std::next(it) : session.provenance.persons.erase(it);
      session.edits.insert(Field::Persons);
    } else {
      auto field = field_from_name(path);
      if (!field || *field == Field::Persons || parts.size() != 1)
        unknown_field(path);
      set_schema_field(session.record, *field, value, path);
      session.provenance.fields.erase(path);
      session.edits.insert(*field);
    }
    session.modified_at = tick(session.modified_at);
    refresh(session);
  });
}

std::string Service::export_session(const std::string &id) {
  return export_codemeta(store_.get(id).record);
}

Session Service::import_metadata(const std::optional<std::string> &id,
                                 std::string_view codemeta_text) {
  std::vector<Violation> issues;
  CodeMetaRecord imported = parse_codemeta(codemeta_text, &issues);

  auto overlay = [&](Session &session) {
    for (Field field : kAllFields) {
      if (field == Field::Persons || !imported.has(field))
        continue;
      if (auto *values = imported.list(field))
        *session.record.list(field) = *values;
      else
        *session.record.scalar(field) = *imported.scalar(field);
      session.provenance.fields[std::string(field_name(field))] = SourceKind::CodeMetaFile;
      session.edits.erase(field);
    }
    for (const auto &[key, value] : imported.extras.items()) {
      session.record.extras[key] = value;
      session.provenance.fields[key] = SourceKind::CodeMetaFile;
    }
    if (!imported.persons.empty()) {
      auto previous = session.provenance.persons;
      session.record.persons = merge_person_lists(
          {{imported.persons, SourceKind::CodeMetaFile},
           {session.record.persons, SourceKind::CodeMetaFile}},
          config_.precedence);
      session.provenance.persons.clear();
      for (const Person &p : session.record.persons) {
        auto &sources = session.provenance.persons[identity_key(p)];
        for (const auto &[key, kinds] : previous)
          for (const Person &old : session.record.persons)
            if (identity_key(old) == key && same_identity(old, p))
              sources.insert(kinds.begin(), kinds.end());
        for (const Person &q : imported.persons)
          if (same_identity(p, q))
            sources.insert(SourceKind::CodeMetaFile);
      }
    }
    session.report.push_back({SourceKind::CodeMetaFile, HarvestOutcome::Harvested, "imported"});
    refresh(session);
    session.violations.insert(session.violations.end(), issues.begin(), issues.end());
  };

  if (id) {
    return store_.mutate(*id, [&](Session &session) {
      session.modified_at = tick(session.modified_at);
      overlay(session);
    });
  }

  Session session;
  session.id = new_session_id();
  if (imported.code_repository) {
    try {
      session.locator = parse_repo_url(*imported.code_repository);
    } catch (const Error &) {
    }
  }
  session.created_at = session.modified_at = config_.now();
  overlay(session);
  store_.put(session);
  return session;
}

} // namespace smecs
