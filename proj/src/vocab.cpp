#include "smecs/vocab.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smecs/error.hpp"
#include "smecs/text.hpp"

#ifndef SMECS_DEFAULT_VOCAB_DIR
#define SMECS_DEFAULT_VOCAB_DIR "data/vocab"
#endif

namespace smecs {

namespace {

[[noreturn]] void malformed(const std::string &what) {
  throw Error(ErrorCode::MalformedVocabulary, what);
}

std::vector<VocabularyEntry> unique_entries(std::vector<VocabularyEntry> entries) {
  std::vector<VocabularyEntry> out;
  std::unordered_map<std::string, bool> seen;
  for (auto &entry : entries)
    if (seen.emplace(entry.id, true).second)
      out.push_back(std::move(entry));
  return out;
}

Vocabulary load_licenses(std::string_view source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source.begin(), source.end());
  } catch (const nlohmann::json::parse_error &e) {
    malformed(std::string("license list is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("licenses") || !doc["licenses"].is_array())
    malformed("license list has no \"licenses\" array");

  std::vector<VocabularyEntry> offered;
  std::vector<VocabularyEntry> retired;
  for (const auto &item : doc["licenses"]) {
    if (!item.is_object() || !item.contains("licenseId") || !item["licenseId"].is_string())
      malformed("license entry without a licenseId");
    VocabularyEntry entry{item["licenseId"].get<std::string>(), ""};
    entry.label = item.contains("name") && item["name"].is_string()
                      ? item["name"].get<std::string>()
                      : entry.id;
    bool deprecated = item.value("isDeprecatedLicenseId", false);
    (deprecated ? retired : offered).push_back(std::move(entry));
  }
  return Vocabulary(VocabularyKind::License, unique_entries(std::move(offered)),
                    unique_entries(std::move(retired)));
}

Vocabulary load_languages(std::string_view source) {
  std::vector<VocabularyEntry> entries;
  std::string_view trimmed = text::trim(source);
  if (!trimmed.empty() && (trimmed.front() == '[' || trimmed.front() == '{')) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(trimmed.begin(), trimmed.end());
    } catch (const nlohmann::json::parse_error &e) {
      malformed(std::string("language list is not JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("languages"))
      doc = doc["languages"];
    if (!doc.is_array())
      malformed("language list must be an array");
    for (const auto &item : doc) {
      std::string name;
      if (item.is_string())
        name = item.get<std::string>();
      else if (item.is_object() && item.contains("name") && item["name"].is_string())
        name = item["name"].get<std::string>();
      else
        malformed("language entry must be a name");
      name = std::string(text::trim(name));
      if (!name.empty())
        entries.push_back({name, name});
    }
  } else {
    std::istringstream lines{std::string(trimmed)};
    std::string line;
    while (std::getline(lines, line)) {
      std::string name(text::trim(line));
      if (!name.empty() && name.front() != '#')
        entries.push_back({name, name});
    }
  }
  return Vocabulary(VocabularyKind::Language, unique_entries(std::move(entries)));
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    malformed("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

} // namespace

Vocabulary::Vocabulary(VocabularyKind kind, std::vector<VocabularyEntry> entries,
                       std::vector<VocabularyEntry> retired)
    : kind_(kind), entries_(std::move(entries)), retired_(std::move(retired)) {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    index_.emplace(entries_[i].id, i);
  for (std::size_t i = 0; i < retired_.size(); ++i)
    retired_index_.emplace(retired_[i].id, i);
}

std::optional<VocabularyEntry> Vocabulary::resolve(std::string_view id) const {
  std::string key(id);
  if (auto it = index_.find(key); it != index_.end())
    return entries_[it->second];
  if (auto it = retired_index_.find(key); it != retired_index_.end())
    return retired_[it->second];
  return std::nullopt;
}

bool Vocabulary::is_retired(std::string_view id) const {
  return retired_index_.count(std::string(id)) > 0;
}

Vocabulary load_vocabulary(VocabularyKind kind, std::string_view source) {
  if (text::trim(source).empty())
    malformed("vocabulary source is empty");
  Vocabulary vocab = kind == VocabularyKind::License ? load_licenses(source) : load_languages(source);
  if (vocab.size() == 0)
    malformed("vocabulary has no entries");
  return vocab;
}

std::vector<VocabularyEntry> filter_vocabulary(const Vocabulary &vocab, std::string_view query,
                                               std::size_t limit) {
  std::vector<VocabularyEntry> out;
  if (limit == 0)
    return out;
  std::string needle = text::lower(text::trim(query));

  std::vector<const VocabularyEntry *> groups[3];
  for (const auto &entry : vocab.entries()) {
    std::string id = text::lower(entry.id);
    std::string label = text::lower(entry.label);
    if (id.rfind(needle, 0) == 0)
      groups[0].push_back(&entry);
    else if (label.rfind(needle, 0) == 0)
      groups[1].push_back(&entry);
    else if (id.find(needle) != std::string::npos || label.find(needle) != std::string::npos)
      groups[2].push_back(&entry);
  }
  for (const auto &group : groups)
    for (const VocabularyEntry *entry : group) {
      if (out.size() == limit)
        return out;
      out.push_back(*entry);
    }
  return out;
}

VocabularySet load_vocabulary_dir(const std::filesystem::path &dir) {
  return {load_vocabulary(VocabularyKind::License, read_file(dir / kLicenseSnapshotFile)),
          load_vocabulary(VocabularyKind::Language, read_file(dir / kLanguageSnapshotFile))};
}

std::filesystem::path default_vocabulary_dir() {
  if (const char *env = std::getenv("SMECS_VOCAB_DIR"); env && *env)
    return env;
  return SMECS_DEFAULT_VOCAB_DIR;
}

} // namespace smecs
