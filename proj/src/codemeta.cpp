#include <set>

#include "smecs/error.hpp"
#include "smecs/merge.hpp"
#include "smecs/model.hpp"
#include "smecs/text.hpp"

namespace smecs {

namespace {

const std::set<std::string, std::less<>> kPersonKeys = {"author", "contributor"};

Json codemeta_person(const Person &p) {
  Json out = Json::object();
  out["@type"] = "Person";
  if (p.id)
    out["@id"] = *p.id;
  if (p.given_name)
    out["givenName"] = *p.given_name;
  if (p.family_name)
    out["familyName"] = *p.family_name;
  if (p.email)
    out["email"] = *p.email;
  if (p.affiliation)
    out["affiliation"] = Json{{"@type", "Organization"}, {"name", *p.affiliation}};
  return out;
}

std::optional<std::string> string_member(const Json &obj, std::initializer_list<const char *> keys) {
  for (const char *key : keys) {
    auto it = obj.find(key);
    if (it != obj.end() && it->is_string())
      return it->get<std::string>();
  }
  return std::nullopt;
}

std::optional<std::string> affiliation_text(const Json &value) {
  if (value.is_string())
    return value.get<std::string>();
  if (value.is_object())
    return string_member(value, {"name", "legalName"});
  if (value.is_array()) {
    for (const auto &item : value)
      if (auto text = affiliation_text(item))
        return text;
  }
  return std::nullopt;
}

std::optional<Person> codemeta_person_from(const Json &value, Role role) {
  if (!value.is_object())
    return std::nullopt;
  Person p;
  p.given_name = string_member(value, {"givenName"});
  p.family_name = string_member(value, {"familyName"});
  if (!p.family_name)
    p.family_name = string_member(value, {"name"});
  p.email = string_member(value, {"email"});
  p.id = string_member(value, {"@id", "id", "identifier"});
  if (auto it = value.find("affiliation"); it != value.end())
    p.affiliation = affiliation_text(*it);
  p.roles.add(role);
  return p;
}

std::string scalar_text(const Json &value) {
  if (value.is_string())
    return value.get<std::string>();
  return value.dump();
}

} // namespace

Json to_codemeta_json(const CodeMetaRecord &record) {
  Json doc = Json::object();
  doc["@context"] = kCodeMetaContext;
  doc["@type"] = "SoftwareSourceCode";
  for (Field field : kAllFields) {
    if (field == Field::Persons || !record.has(field))
      continue;
    std::string key(field_name(field));
    if (const auto *values = record.list(field)) {
      doc[key] = *values;
    } else if (field == Field::License) {
      doc[key] = std::string(kSpdxUrlPrefix) + *record.license;
    } else {
      doc[key] = **record.scalar(field);
    }
  }

  Json authors = Json::array();
  Json contributors = Json::array();
  for (const Person &p : record.persons) {
    if (p.roles.has(Role::Author))
      authors.push_back(codemeta_person(p));
    if (p.roles.has(Role::Contributor))
      contributors.push_back(codemeta_person(p));
  }
  if (!authors.empty())
    doc["author"] = std::move(authors);
  if (!contributors.empty())
    doc["contributor"] = std::move(contributors);

  for (const auto &[key, value] : record.extras.items())
    if (!doc.contains(key))
      doc[key] = value;
  return doc;
}

std::string export_codemeta(const CodeMetaRecord &record) {
  if (!record.name)
    throw Error(ErrorCode::MissingName, "cannot export: the software name is missing");
  return to_codemeta_json(record).dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

CodeMetaRecord parse_codemeta(std::string_view text, std::vector<Violation> *issues) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error &e) {
    throw Error(ErrorCode::MalformedJson,
                "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return codemeta_from_json(doc, issues);
}

CodeMetaRecord codemeta_from_json(const Json &doc, std::vector<Violation> *issues) {
  if (!doc.is_object())
    throw Error(ErrorCode::MalformedJson, "a CodeMeta document must be a JSON object");

  CodeMetaRecord record;
  std::vector<Person> authors;
  std::vector<Person> contributors;

  auto wrong_type = [&](const std::string &key, const Json &value, std::string_view expected) {
    record.extras[key] = value;
    if (issues)
      issues->push_back({key, std::string(rules::kWrongType),
                         "expected " + std::string(expected) + ", found " + value.type_name()});
  };

  for (const auto &[key, value] : doc.items()) {
    if (key == "@context" || key == "@type")
      continue;

    if (kPersonKeys.count(key)) {
      Role role = key == "author" ? Role::Author : Role::Contributor;
      auto &target = role == Role::Author ? authors : contributors;
      Json items = value.is_array() ? value : Json::array({value});
      Json rejected = Json::array();
      for (const auto &item : items) {
        if (auto p = codemeta_person_from(item, role))
          target.push_back(std::move(*p));
        else
          rejected.push_back(item);
      }
      if (!rejected.empty())
        wrong_type(key, rejected, "person objects");
      continue;
    }

    auto field = field_from_name(key);
    if (!field || *field == Field::Persons) {
      record.extras[key] = value;
      continue;
    }

    if (auto *values = record.list(*field)) {
      if (value.is_string()) {
        if (*field == Field::Keywords) {
          for (const auto &part : text::split(value.get<std::string>(), ','))
            if (auto t = text::trim(part); !t.empty())
              append_unique(*values, std::string(t));
        } else {
          append_unique(*values, value.get<std::string>());
        }
        continue;
      }
      if (!value.is_array()) {
        wrong_type(key, value, "a list of text");
        continue;
      }
      Json rejected = Json::array();
      for (const auto &item : value) {
        if (item.is_string())
          append_unique(*values, item.get<std::string>());
        else if (auto name = item.is_object() ? string_member(item, {"name"}) : std::nullopt)
          append_unique(*values, *name);
        else
          rejected.push_back(item);
      }
      if (!rejected.empty())
        wrong_type(key, rejected, "text entries");
      continue;
    }

    auto *slot = record.scalar(*field);
    if (*field == Field::License) {
      std::optional<std::string> raw;
      if (value.is_string())
        raw = value.get<std::string>();
      else if (value.is_object())
        raw = string_member(value, {"@id", "url", "identifier"});
      else if (value.is_array() && value.size() == 1 && value[0].is_string())
        raw = value[0].get<std::string>();
      if (!raw) {
        wrong_type(key, value, "an SPDX identifier or URL");
        continue;
      }
      *slot = normalize_license(*raw);
      continue;
    }

    bool numeric_ok = *field == Field::Version || *field == Field::Identifier;
    if (value.is_string() || (numeric_ok && value.is_number())) {
      std::string t = scalar_text(value);
      *slot = is_date_field(*field) ? normalize_date(t) : t;
    } else {
      wrong_type(key, value, "text");
    }
  }

  record.persons = merge_person_lists(
      {{std::move(authors), SourceKind::CodeMetaFile}, {std::move(contributors), SourceKind::CodeMetaFile}});
  return record;
}

Json person_to_json(const Person &p) {
  Json out = Json::object();
  if (p.given_name)
    out["givenName"] = *p.given_name;
  if (p.family_name)
    out["familyName"] = *p.family_name;
  if (p.email)
    out["email"] = *p.email;
  if (p.id)
    out["id"] = *p.id;
  if (p.affiliation)
    out["affiliation"] = *p.affiliation;
  Json roles = Json::array();
  for (Role r : {Role::Author, Role::Contributor})
    if (p.roles.has(r))
      roles.push_back(to_string(r));
  out["roles"] = std::move(roles);
  return out;
}

Person person_from_json(const Json &doc) {
  if (!doc.is_object())
    throw Error(ErrorCode::InvariantViolation, "a person must be a JSON object");
  Person p;
  auto text_member = [&doc](const char *key) -> std::optional<std::string> {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null())
      return std::nullopt;
    if (!it->is_string())
      throw Error(ErrorCode::InvariantViolation, std::string("person ") + key + " must be text");
    std::string value = it->get<std::string>();
    if (text::trim(value).empty())
      return std::nullopt;
    return value;
  };
  p.given_name = text_member("givenName");
  p.family_name = text_member("familyName");
  p.email = text_member("email");
  p.id = text_member("id");
  p.affiliation = text_member("affiliation");
  if (auto it = doc.find("roles"); it != doc.end()) {
    if (!it->is_array())
      throw Error(ErrorCode::InvariantViolation, "person roles must be a list");
    for (const auto &r : *it) {
      auto role = r.is_string() ? role_from_name(r.get<std::string>()) : std::nullopt;
      if (!role)
        throw Error(ErrorCode::InvariantViolation, "unknown role " + r.dump());
      p.roles.add(*role);
    }
  }
  return p;
}

Json record_to_json(const CodeMetaRecord &record) {
  Json out = Json::object();
  for (Field field : kAllFields) {
    if (field == Field::Persons || !record.has(field))
      continue;
    std::string key(field_name(field));
    if (const auto *values = record.list(field))
      out[key] = *values;
    else
      out[key] = **record.scalar(field);
  }
  Json persons = Json::array();
  for (const Person &p : record.persons)
    persons.push_back(person_to_json(p));
  out["persons"] = std::move(persons);
  out["extras"] = record.extras;
  return out;
}

CodeMetaRecord record_from_json(const Json &doc) {
  if (!doc.is_object())
    throw Error(ErrorCode::MalformedJson, "a record must be a JSON object");
  CodeMetaRecord record;
  for (Field field : kAllFields) {
    if (field == Field::Persons)
      continue;
    auto it = doc.find(std::string(field_name(field)));
    if (it == doc.end() || it->is_null())
      continue;
    if (auto *values = record.list(field)) {
      for (const auto &v : *it)
        values->push_back(v.get<std::string>());
    } else {
      *record.scalar(field) = it->get<std::string>();
    }
  }
  if (auto it = doc.find("persons"); it != doc.end())
    for (const auto &p : *it)
      record.persons.push_back(person_from_json(p));
  if (auto it = doc.find("extras"); it != doc.end() && it->is_object())
    record.extras = *it;
  return record;
}

} // namespace smecs
