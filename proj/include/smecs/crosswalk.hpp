#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smecs/harvest.hpp"
#include "smecs/model.hpp"

namespace smecs {

enum class Transform {
  Identity,
  DateTruncate,
  SpdxNormalize,
  LanguageMapKeys,
  PersonList,
  UrlDerive,
};

std::string_view to_string(Transform transform);
std::optional<Transform> transform_from_name(std::string_view name);

// One line of a crosswalk table.
//
// source_path is dot separated; a segment may select the first array element
// with a matching member, e.g. "identifiers[type=doi].value".
struct MappingRule {
  std::string source_path;
  Field target = Field::Name;
  Transform transform = Transform::Identity;
  bool fallback = false;        // fires only when the target is still empty
  Role role = Role::Author;     // PersonList
  std::string suffix;           // UrlDerive
  // PersonList: person attribute -> candidate keys in the source object.
  std::map<std::string, std::vector<std::string>> person_fields;
};

class CrosswalkTable {
public:
  CrosswalkTable() = default;
  // Throws Error(MalformedCrosswalk) if two rules share a target and the
  // later one is not marked fallback.
  explicit CrosswalkTable(std::vector<MappingRule> rules);

  const std::vector<MappingRule> &rules() const { return rules_; }

  // JSON array of {source_path, target, transform, [fallback], [role],
  // [suffix], [person_fields]}.
  static CrosswalkTable from_json(std::string_view text);
  Json to_json() const;

private:
  std::vector<MappingRule> rules_;
};

const CrosswalkTable &builtin_github_table();
const CrosswalkTable &builtin_cff_table();

struct CrosswalkTables {
  CrosswalkTable github = builtin_github_table();
  CrosswalkTable cff = builtin_cff_table();
};

enum class RuleOutcome { Fired, Skipped, Shadowed };

std::string_view to_string(RuleOutcome outcome);

struct RuleFiring {
  std::string source_path;
  Field target;
  RuleOutcome outcome;
};

struct PartialRecord {
  CodeMetaRecord record;
  SourceKind source = SourceKind::GitHubApi;
  std::vector<RuleFiring> report;
  // Type problems met while reading a codemeta.json source.
  std::vector<Violation> issues;
};

PartialRecord apply_crosswalk(const SourceRecord &src,
                              const CrosswalkTables &tables = {});

// Fields that ended up populated in a partial record.
std::vector<Field> populated_fields(const CodeMetaRecord &record);

} // namespace smecs
