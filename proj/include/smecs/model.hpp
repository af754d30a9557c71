#pragma once

#include <array>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace smecs {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kCodeMetaContext =
    "https://doi.org/10.5063/schema/codemeta-2.0";
inline constexpr std::string_view kSpdxUrlPrefix = "https://spdx.org/licenses/";

// Fields of the curation form, in export order.
enum class Field {
  Name,
  Description,
  Version,
  CodeRepository,
  Url,
  IssueTracker,
  DownloadUrl,
  License,
  ProgrammingLanguage,
  Keywords,
  DateCreated,
  DateModified,
  DatePublished,
  Identifier,
  DevelopmentStatus,
  Persons,
};

inline constexpr std::array<Field, 16> kAllFields = {
    Field::Name,          Field::Description,  Field::Version,
    Field::CodeRepository, Field::Url,         Field::IssueTracker,
    Field::DownloadUrl,   Field::License,      Field::ProgrammingLanguage,
    Field::Keywords,      Field::DateCreated,  Field::DateModified,
    Field::DatePublished, Field::Identifier,   Field::DevelopmentStatus,
    Field::Persons,
};

std::string_view field_name(Field field);
std::optional<Field> field_from_name(std::string_view name);
bool is_list_field(Field field);
bool is_url_field(Field field);
bool is_date_field(Field field);

enum class Role : unsigned { Author = 1u, Contributor = 2u };

std::string_view to_string(Role role);
std::optional<Role> role_from_name(std::string_view name);

class RoleSet {
public:
  RoleSet() = default;
  RoleSet(std::initializer_list<Role> roles) {
    for (Role r : roles)
      add(r);
  }

  bool has(Role role) const { return (bits_ & static_cast<unsigned>(role)) != 0; }
  void add(Role role) { bits_ |= static_cast<unsigned>(role); }
  void remove(Role role) { bits_ &= ~static_cast<unsigned>(role); }
  bool empty() const { return bits_ == 0; }

  RoleSet operator|(RoleSet other) const {
    RoleSet out;
    out.bits_ = bits_ | other.bits_;
    return out;
  }
  RoleSet &operator|=(RoleSet other) {
    bits_ |= other.bits_;
    return *this;
  }
  bool operator==(const RoleSet &) const = default;

private:
  unsigned bits_ = 0;
};

struct Person {
  std::optional<std::string> given_name;
  std::optional<std::string> family_name;
  std::optional<std::string> email;
  std::optional<std::string> id; // usually an ORCID URL
  std::optional<std::string> affiliation;
  RoleSet roles;

  // A person needs at least one role and something to recognise them by.
  bool identifiable() const { return family_name || email || id; }

  bool operator==(const Person &) const = default;
};

// Key used to group person entries: id, else lowercased email, else the
// lowercased (given, family) pair.
std::string identity_key(const Person &person);

// Compares two people on the first identity attribute both of them carry
// (id, then email, then name pair).
bool same_identity(const Person &a, const Person &b);

struct CodeMetaRecord {
  std::optional<std::string> name;
  std::optional<std::string> description;
  std::optional<std::string> version;
  std::optional<std::string> code_repository;
  std::optional<std::string> url;
  std::optional<std::string> issue_tracker;
  std::optional<std::string> download_url;
  std::optional<std::string> license; // bare SPDX identifier
  std::vector<std::string> programming_language;
  std::vector<std::string> keywords;
  std::optional<std::string> date_created;
  std::optional<std::string> date_modified;
  std::optional<std::string> date_published;
  std::optional<std::string> identifier;
  std::optional<std::string> development_status;
  std::vector<Person> persons;
  // Keys the model does not know, carried through export untouched.
  Json extras = Json::object();

  std::optional<std::string> *scalar(Field field);
  const std::optional<std::string> *scalar(Field field) const;
  std::vector<std::string> *list(Field field);
  const std::vector<std::string> *list(Field field) const;

  bool has(Field field) const;
  void clear(Field field);

  bool operator==(const CodeMetaRecord &) const = default;
};

enum class CurationStatus { Missing, Review, Extracted, Edited };

std::string_view to_string(CurationStatus status);

namespace rules {
inline constexpr std::string_view kNamePresent = "name-present";
inline constexpr std::string_view kLicenseInSpdx = "license-in-SPDX";
inline constexpr std::string_view kUrlWellFormed = "URL-well-formed";
inline constexpr std::string_view kDateIso8601 = "date-ISO-8601";
inline constexpr std::string_view kPersonInvariants = "person-invariants";
inline constexpr std::string_view kListUnique = "list-unique";
inline constexpr std::string_view kWrongType = "wrong-type";
} // namespace rules

struct Violation {
  std::string field;
  std::string rule;
  std::string message;

  bool operator==(const Violation &) const = default;
};

// Value helpers shared by the crosswalk, the importer and the service.

// True for YYYY-MM-DD with a real calendar date.
bool is_iso_date(std::string_view text);
// Cuts an ISO-8601 timestamp down to its date; other text is returned as is.
std::string normalize_date(std::string_view text);
// Strips the SPDX URL form down to the identifier. NOASSERTION and blank
// values have no license.
std::optional<std::string> normalize_license(std::string_view text);
// http or https with a non-empty host.
bool is_well_formed_url(std::string_view text);
// Appends values not already present (case-sensitive).
void append_unique(std::vector<std::string> &list, std::string value);

class VocabularySet;

std::vector<Violation> validate_record(const CodeMetaRecord &record,
                                       const VocabularySet &vocab);

// CodeMeta 2.0 JSON-LD document for the record. Does not require a name.
Json to_codemeta_json(const CodeMetaRecord &record);

// The export file: throws Error(MissingName) when the record has no name.
std::string export_codemeta(const CodeMetaRecord &record);

// Reads a CodeMeta document. Throws Error(MalformedJson) when the text is not
// JSON. Values of the wrong type are skipped, kept in extras and reported in
// `issues` when given.
CodeMetaRecord parse_codemeta(std::string_view text,
                              std::vector<Violation> *issues = nullptr);
CodeMetaRecord codemeta_from_json(const Json &doc,
                                  std::vector<Violation> *issues = nullptr);

// Session-facing representation: schema fields plus a unified persons table
// with explicit role lists. Used by the HTTP API and session files.
Json record_to_json(const CodeMetaRecord &record);
CodeMetaRecord record_from_json(const Json &doc);
Json person_to_json(const Person &person);
Person person_from_json(const Json &doc);

} // namespace smecs
