#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "smecs/crosswalk.hpp"
#include "smecs/harvest.hpp"
#include "smecs/model.hpp"

namespace smecs {

// Earlier sources win.
using Precedence = std::vector<SourceKind>;

inline Precedence default_precedence() {
  return {SourceKind::CodeMetaFile, SourceKind::CffFile, SourceKind::GitHubApi};
}

// Position of a source in the order; unknown sources rank last.
std::size_t precedence_rank(const Precedence &order, SourceKind kind);

struct ProvenanceMap {
  // Field name (schema fields and extras keys) -> winning source.
  std::map<std::string, SourceKind> fields;
  // Person identity key -> every source that mentioned the person.
  std::map<std::string, std::set<SourceKind>> persons;

  bool operator==(const ProvenanceMap &) const = default;
};

struct MergeResult {
  CodeMetaRecord record;
  ProvenanceMap provenance;
};

MergeResult merge_sources(const std::vector<PartialRecord> &parts,
                          const Precedence &order = default_precedence());

using PersonSource = std::pair<std::vector<Person>, SourceKind>;

// Groups people across sources by identity, unions their roles and fills
// attributes from the highest-precedence source. Authors come first.
std::vector<Person> merge_person_lists(const std::vector<PersonSource> &lists,
                                       const Precedence &order = default_precedence());

using StatusMap = std::map<Field, CurationStatus>;

inline std::set<Field> default_review_fields() {
  return {Field::Url, Field::IssueTracker, Field::DownloadUrl, Field::CodeRepository,
          Field::Keywords};
}

// Missing when absent, Edited when the user touched it (or the value has no
// source), Review for extracted values in `review_fields`, else Extracted.
StatusMap classify_fields(const CodeMetaRecord &record, const ProvenanceMap &provenance,
                          const std::set<Field> &edits,
                          const std::set<Field> &review_fields = default_review_fields());

} // namespace smecs
