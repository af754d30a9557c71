#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace smecs {

enum class VocabularyKind { License, Language };

struct VocabularyEntry {
  std::string id;
  std::string label;

  bool operator==(const VocabularyEntry &) const = default;
};

class Vocabulary {
public:
  Vocabulary() = default;
  Vocabulary(VocabularyKind kind, std::vector<VocabularyEntry> entries,
             std::vector<VocabularyEntry> retired = {});

  VocabularyKind kind() const { return kind_; }
  const std::vector<VocabularyEntry> &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Exact id lookup over the offered entries, falling back to retired ids
  // (deprecated SPDX identifiers such as "AGPL-3.0" that GitHub still emits).
  std::optional<VocabularyEntry> resolve(std::string_view id) const;
  bool contains(std::string_view id) const { return resolve(id).has_value(); }
  bool is_retired(std::string_view id) const;

private:
  VocabularyKind kind_ = VocabularyKind::License;
  std::vector<VocabularyEntry> entries_;
  std::vector<VocabularyEntry> retired_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::size_t> retired_index_;
};

struct VocabularySet {
  Vocabulary licenses;
  Vocabulary languages;
};

// License: SPDX license-list-data JSON (licenses[].licenseId / name, entries
// with isDeprecatedLicenseId dropped from the offered list).
// Language: a flat list of names, either a JSON array (of strings or of
// objects with "name") or plain text with one name per line.
// Throws Error(MalformedVocabulary).
Vocabulary load_vocabulary(VocabularyKind kind, std::string_view source);

// Ranked, case-insensitive lookup: id prefix matches, then label prefix
// matches, then substring matches, each group in vocabulary order.
std::vector<VocabularyEntry> filter_vocabulary(const Vocabulary &vocab,
                                               std::string_view query,
                                               std::size_t limit);

inline constexpr std::string_view kLicenseSnapshotFile = "licenses.json";
inline constexpr std::string_view kLanguageSnapshotFile = "languages.json";

// Loads licenses.json and languages.json from a snapshot directory.
VocabularySet load_vocabulary_dir(const std::filesystem::path &dir);

// Directory holding the bundled snapshots: $SMECS_VOCAB_DIR when set, else
// the location configured at build time.
std::filesystem::path default_vocabulary_dir();

} // namespace smecs
