#include "smecs/model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "smecs/text.hpp"
#include "smecs/vocab.hpp"

namespace smecs {

namespace {

struct FieldInfo {
  Field field;
  std::string_view name;
};

constexpr std::array<FieldInfo, 16> kFieldInfo = {{
    {Field::Name, "name"},
    {Field::Description, "description"},
    {Field::Version, "version"},
    {Field::CodeRepository, "codeRepository"},
    {Field::Url, "url"},
    {Field::IssueTracker, "issueTracker"},
    {Field::DownloadUrl, "downloadUrl"},
    {Field::License, "license"},
    {Field::ProgrammingLanguage, "programmingLanguage"},
    {Field::Keywords, "keywords"},
    {Field::DateCreated, "dateCreated"},
    {Field::DateModified, "dateModified"},
    {Field::DatePublished, "datePublished"},
    {Field::Identifier, "identifier"},
    {Field::DevelopmentStatus, "developmentStatus"},
    {Field::Persons, "persons"},
}};

bool leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

} // namespace

std::string_view field_name(Field field) {
  for (const auto &info : kFieldInfo)
    if (info.field == field)
      return info.name;
  return "";
}

std::optional<Field> field_from_name(std::string_view name) {
  for (const auto &info : kFieldInfo)
    if (info.name == name)
      return info.field;
  return std::nullopt;
}

bool is_list_field(Field field) {
  return field == Field::ProgrammingLanguage || field == Field::Keywords;
}

bool is_url_field(Field field) {
  return field == Field::CodeRepository || field == Field::Url ||
         field == Field::IssueTracker || field == Field::DownloadUrl;
}

bool is_date_field(Field field) {
  return field == Field::DateCreated || field == Field::DateModified ||
         field == Field::DatePublished;
}

std::string_view to_string(Role role) {
  return role == Role::Author ? "Author" : "Contributor";
}

std::optional<Role> role_from_name(std::string_view name) {
  std::string lowered = text::lower(name);
  if (lowered == "author")
    return Role::Author;
  if (lowered == "contributor")
    return Role::Contributor;
  return std::nullopt;
}

std::string_view to_string(CurationStatus status) {
  switch (status) {
  case CurationStatus::Missing: return "Missing";
  case CurationStatus::Review: return "Review";
  case CurationStatus::Extracted: return "Extracted";
  case CurationStatus::Edited: return "Edited";
  }
  return "Missing";
}

std::string identity_key(const Person &person) {
  if (person.id)
    return "id:" + *person.id;
  if (person.email)
    return "email:" + text::lower(*person.email);
  return "name:" + text::lower(person.given_name.value_or("")) + "|" +
         text::lower(person.family_name.value_or(""));
}

bool same_identity(const Person &a, const Person &b) {
  if (a.id && b.id)
    return *a.id == *b.id;
  if (a.email && b.email)
    return text::lower(*a.email) == text::lower(*b.email);
  if (a.family_name && b.family_name)
    return text::lower(*a.family_name) == text::lower(*b.family_name) &&
           text::lower(a.given_name.value_or("")) == text::lower(b.given_name.value_or(""));
  return false;
}

std::optional<std::string> *CodeMetaRecord::scalar(Field field) {
  return const_cast<std::optional<std::string> *>(
      static_cast<const CodeMetaRecord *>(this)->scalar(field));
}

const std::optional<std::string> *CodeMetaRecord::scalar(Field field) const {
  switch (field) {
  case Field::Name: return &name;
  case Field::Description: return &description;
  case Field::Version: return &version;
  case Field::CodeRepository: return &code_repository;
  case Field::Url: return &url;
  case Field::IssueTracker: return &issue_tracker;
  case Field::DownloadUrl: return &download_url;
  case Field::License: return &license;
  case Field::DateCreated: return &date_created;
  case Field::DateModified: return &date_modified;
  case Field::DatePublished: return &date_published;
  case Field::Identifier: return &identifier;
  case Field::DevelopmentStatus: return &development_status;
  default: return nullptr;
  }
}

std::vector<std::string> *CodeMetaRecord::list(Field field) {
  return const_cast<std::vector<std::string> *>(
      static_cast<const CodeMetaRecord *>(this)->list(field));
}

const std::vector<std::string> *CodeMetaRecord::list(Field field) const {
  switch (field) {
  case Field::ProgrammingLanguage: return &programming_language;
  case Field::Keywords: return &keywords;
  default: return nullptr;
  }
}

bool CodeMetaRecord::has(Field field) const {
  if (field == Field::Persons)
    return !persons.empty();
  if (const auto *values = list(field))
    return !values->empty();
  return scalar(field)->has_value();
}

void CodeMetaRecord::clear(Field field) {
  if (field == Field::Persons)
    persons.clear();
  else if (auto *values = list(field))
    values->clear();
  else
    scalar(field)->reset();
}

bool is_iso_date(std::string_view t) {
  if (t.size() != 10 || t[4] != '-' || t[7] != '-')
    return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(t[i])))
      return false;
  int year = std::stoi(std::string(t.substr(0, 4)));
  int month = std::stoi(std::string(t.substr(5, 2)));
  int day = std::stoi(std::string(t.substr(8, 2)));
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12 || day < 1)
    return false;
  int limit = kDays[month - 1] + (month == 2 && leap_year(year) ? 1 : 0);
  return day <= limit;
}

std::string normalize_date(std::string_view text) {
  std::string_view trimmed = text::trim(text);
  if (trimmed.size() > 10 && is_iso_date(trimmed.substr(0, 10)) &&
      (trimmed[10] == 'T' || trimmed[10] == ' '))
    return std::string(trimmed.substr(0, 10));
  return std::string(trimmed);
}

std::optional<std::string> normalize_license(std::string_view text) {
  std::string_view value = text::trim(text);
  for (std::string_view prefix : {"https://spdx.org/licenses/", "http://spdx.org/licenses/"}) {
    if (value.substr(0, prefix.size()) == prefix) {
      value.remove_prefix(prefix.size());
      for (std::string_view ext : {".html", ".json"})
        if (value.size() > ext.size() && value.substr(value.size() - ext.size()) == ext)
          value.remove_suffix(ext.size());
      break;
    }
  }
  if (value.empty() || value == "NOASSERTION")
    return std::nullopt;
  return std::string(value);
}

bool is_well_formed_url(std::string_view text) {
  if (std::any_of(text.begin(), text.end(),
                  [](unsigned char c) { return std::isspace(c) || std::iscntrl(c); }))
    return false;
  auto sep = text.find("://");
  if (sep == std::string_view::npos)
    return false;
  std::string scheme = text::lower(text.substr(0, sep));
  if (scheme != "http" && scheme != "https")
    return false;
  std::string_view rest = text.substr(sep + 3);
  std::string_view authority = rest.substr(0, rest.find_first_of("/?#"));
  if (auto at = authority.rfind('@'); at != std::string_view::npos)
    authority.remove_prefix(at + 1);
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos &&
                                         authority.find(']') == std::string_view::npos)
    authority = authority.substr(0, colon);
  return !authority.empty();
}

void append_unique(std::vector<std::string> &list, std::string value) {
  if (std::find(list.begin(), list.end(), value) == list.end())
    list.push_back(std::move(value));
}

namespace {

// A plain id, or a flat "A OR B" / "A AND B" expression of known ids (the
// shape produced when a citation file lists several licenses).
bool license_known(const Vocabulary &licenses, const std::string &value) {
  if (licenses.contains(value))
    return true;
  std::vector<std::string> operands;
  std::string current;
  std::istringstream words(value);
  std::string word;
  while (words >> word) {
    if (word == "OR" || word == "AND") {
      operands.push_back(current);
      current.clear();
    } else if (current.empty()) {
      current = word;
    } else {
      return false;
    }
  }
  operands.push_back(current);
  if (operands.size() < 2)
    return false;
  return std::all_of(operands.begin(), operands.end(),
                     [&licenses](const std::string &id) { return licenses.contains(id); });
}

} // namespace

std::vector<Violation> validate_record(const CodeMetaRecord &record,
                                       const VocabularySet &vocab) {
  std::vector<Violation> out;
  auto report = [&out](std::string field, std::string_view rule, std::string message) {
    out.push_back({std::move(field), std::string(rule), std::move(message)});
  };

  if (!record.name || text::trim(*record.name).empty())
    report("name", rules::kNamePresent, "a software name is required");

  if (record.license && !license_known(vocab.licenses, *record.license))
    report("license", rules::kLicenseInSpdx,
           "'" + *record.license + "' is not an SPDX license identifier");

  for (Field field : kAllFields) {
    const auto *value = record.scalar(field);
    if (!value || !*value)
      continue;
    if (is_url_field(field) && !is_well_formed_url(**value))
      report(std::string(field_name(field)), rules::kUrlWellFormed,
             "'" + **value + "' is not an http(s) URL with a host");
    if (is_date_field(field) && !is_iso_date(normalize_date(**value)))
      report(std::string(field_name(field)), rules::kDateIso8601,
             "'" + **value + "' is not an ISO-8601 date (YYYY-MM-DD)");
  }

  for (Field field : {Field::ProgrammingLanguage, Field::Keywords}) {
    const auto &values = *record.list(field);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::find(values.begin(), values.begin() + static_cast<long>(i), values[i]) !=
          values.begin() + static_cast<long>(i)) {
        report(std::string(field_name(field)), rules::kListUnique,
               "duplicate entry '" + values[i] + "'");
      }
    }
  }

  for (std::size_t i = 0; i < record.persons.size(); ++i) {
    const Person &p = record.persons[i];
    std::string where = "persons[" + std::to_string(i) + "]";
    if (p.roles.empty())
      report(where, rules::kPersonInvariants, "a person must be an author, a contributor, or both");
    if (!p.identifiable())
      report(where, rules::kPersonInvariants, "a person needs a family name, an email or an id");
    for (std::size_t j = 0; j < i; ++j) {
      if (same_identity(record.persons[j], p)) {
        report(where, rules::kPersonInvariants,
               "same person as persons[" + std::to_string(j) + "]");
        break;
      }
    }
  }
  return out;
}

} // namespace smecs
