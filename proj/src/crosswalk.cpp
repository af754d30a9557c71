#include "smecs/crosswalk.hpp"

#include <algorithm>
#include <set>

#include "smecs/error.hpp"
#include "smecs/text.hpp"

namespace smecs {

namespace {

// Derived from the CodeMeta GitHub crosswalk.
constexpr std::string_view kGitHubTable = R"([
  {"source_path": "repo.name", "target": "name", "transform": "Identity"},
  {"source_path": "repo.description", "target": "description", "transform": "Identity"},
  {"source_path": "repo.html_url", "target": "codeRepository", "transform": "Identity"},
  {"source_path": "repo.homepage", "target": "url", "transform": "Identity"},
  {"source_path": "repo.license.spdx_id", "target": "license", "transform": "SpdxNormalize"},
  {"source_path": "repo.topics", "target": "keywords", "transform": "Identity"},
  {"source_path": "languages", "target": "programmingLanguage", "transform": "LanguageMapKeys"},
  {"source_path": "repo.created_at", "target": "dateCreated", "transform": "DateTruncate"},
  {"source_path": "repo.pushed_at", "target": "dateModified", "transform": "DateTruncate"},
  {"source_path": "repo.updated_at", "target": "dateModified", "transform": "DateTruncate", "fallback": true},
  {"source_path": "repo.html_url", "target": "issueTracker", "transform": "UrlDerive", "suffix": "/issues"},
  {"source_path": "contributors", "target": "persons", "transform": "PersonList", "role": "Contributor",
   "person_fields": {"familyName": ["login"]}}
])";

// CITATION.cff 1.2.0 keys, following the HERMES CFF mapping.
constexpr std::string_view kCffTable = R"([
  {"source_path": "title", "target": "name", "transform": "Identity"},
  {"source_path": "abstract", "target": "description", "transform": "Identity"},
  {"source_path": "version", "target": "version", "transform": "Identity"},
  {"source_path": "license", "target": "license", "transform": "SpdxNormalize"},
  {"source_path": "doi", "target": "identifier", "transform": "Identity"},
  {"source_path": "identifiers[type=doi].value", "target": "identifier", "transform": "Identity", "fallback": true},
  {"source_path": "repository-code", "target": "codeRepository", "transform": "Identity"},
  {"source_path": "keywords", "target": "keywords", "transform": "Identity"},
  {"source_path": "date-released", "target": "datePublished", "transform": "DateTruncate"},
  {"source_path": "authors", "target": "persons", "transform": "PersonList", "role": "Author",
   "person_fields": {"familyName": ["family-names", "name"], "givenName": ["given-names"],
                     "id": ["orcid"], "email": ["email"], "affiliation": ["affiliation"]}}
])";

const std::set<std::string, std::less<>> kPersonAttributes = {"givenName", "familyName", "email",
                                                              "id", "affiliation"};

[[noreturn]] void malformed(const std::string &message) {
  throw Error(ErrorCode::MalformedCrosswalk, message);
}

// Follows a dotted path; "key[member=value]" picks the first matching
// element of an array.
const Json *resolve_path(const Json &root, std::string_view path) {
  const Json *node = &root;
  for (const auto &segment : text::split(path, '.')) {
    std::string_view name = segment;
    std::string_view selector;
    if (auto open = name.find('['); open != std::string_view::npos && name.back() == ']') {
      selector = name.substr(open + 1, name.size() - open - 2);
      name = name.substr(0, open);
    }
    if (!node->is_object())
      return nullptr;
    auto it = node->find(std::string(name));
    if (it == node->end())
      return nullptr;
    node = &*it;
    if (selector.empty())
      continue;
    auto eq = selector.find('=');
    if (eq == std::string_view::npos || !node->is_array())
      return nullptr;
    std::string member(selector.substr(0, eq));
    std::string wanted = text::lower(selector.substr(eq + 1));
    const Json *match = nullptr;
    for (const auto &item : *node) {
      if (!item.is_object())
        continue;
      auto value = item.find(member);
      if (value != item.end() && value->is_string() &&
          text::lower(value->get<std::string>()) == wanted) {
        match = &item;
        break;
      }
    }
    if (!match)
      return nullptr;
    node = match;
  }
  return node;
}

// Scalar source value as text; blanks and NOASSERTION count as absent.
std::optional<std::string> scalar_text(const Json &node) {
  std::string value;
  if (node.is_string())
    value = std::string(text::trim(node.get<std::string>()));
  else if (node.is_number() || node.is_boolean())
    value = node.dump();
  else
    return std::nullopt;
  if (value.empty() || value == "NOASSERTION")
    return std::nullopt;
  return value;
}

std::vector<std::string> list_text(const Json &node) {
  std::vector<std::string> out;
  if (node.is_array()) {
    for (const auto &item : node)
      if (auto value = scalar_text(item))
        append_unique(out, *value);
  } else if (auto value = scalar_text(node)) {
    out.push_back(*value);
  }
  return out;
}

std::vector<std::string> language_keys(const Json &node) {
  if (!node.is_object())
    return {};
  std::vector<std::pair<std::string, double>> langs;
  for (const auto &[key, value] : node.items())
    langs.emplace_back(key, value.is_number() ? value.get<double>() : 0.0);
  std::sort(langs.begin(), langs.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second)
      return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (auto &[key, bytes] : langs)
    if (!text::trim(key).empty())
      append_unique(out, key);
  return out;
}

std::optional<std::string> spdx_value(const Json &node) {
  if (node.is_array()) {
    std::vector<std::string> ids;
    for (const auto &item : node)
      if (item.is_string())
        if (auto id = normalize_license(item.get<std::string>()))
          append_unique(ids, *id);
    if (ids.empty())
      return std::nullopt;
    std::string joined = ids.front();
    for (std::size_t i = 1; i < ids.size(); ++i)
      joined += " OR " + ids[i];
    return joined;
  }
  if (!node.is_string())
    return std::nullopt;
  return normalize_license(node.get<std::string>());
}

std::vector<Person> person_list(const Json &node, const MappingRule &rule) {
  std::vector<Person> out;
  if (!node.is_array())
    return out;
  for (const auto &item : node) {
    if (!item.is_object())
      continue;
    Person p;
    for (const auto &[attribute, keys] : rule.person_fields) {
      std::optional<std::string> value;
      for (const auto &key : keys) {
        auto it = item.find(key);
        if (it != item.end() && (value = scalar_text(*it)))
          break;
      }
      if (!value)
        continue;
      if (attribute == "givenName")
        p.given_name = value;
      else if (attribute == "familyName")
        p.family_name = value;
      else if (attribute == "email")
        p.email = value;
      else if (attribute == "id")
        p.id = value;
      else if (attribute == "affiliation")
        p.affiliation = value;
    }
    p.roles.add(rule.role);
    if (p.identifiable())
      out.push_back(std::move(p));
  }
  return out;
}

bool apply_rule(const MappingRule &rule, const Json &node, CodeMetaRecord &out) {
  switch (rule.transform) {
  case Transform::PersonList: {
    auto persons = person_list(node, rule);
    if (persons.empty())
      return false;
    out.persons = std::move(persons);
    return true;
  }
  case Transform::LanguageMapKeys: {
    auto keys = language_keys(node);
    if (keys.empty())
      return false;
    *out.list(rule.target) = std::move(keys);
    return true;
  }
  default:
    break;
  }

  if (auto *values = out.list(rule.target)) {
    auto items = list_text(node);
    if (items.empty())
      return false;
    *values = std::move(items);
    return true;
  }

  std::optional<std::string> value;
  switch (rule.transform) {
  case Transform::SpdxNormalize:
    value = spdx_value(node);
    break;
  case Transform::DateTruncate:
    if ((value = scalar_text(node)))
      value = normalize_date(*value);
    break;
  case Transform::UrlDerive:
    if ((value = scalar_text(node))) {
      while (!value->empty() && value->back() == '/')
        value->pop_back();
      *value += rule.suffix;
    }
    break;
  default:
    value = scalar_text(node);
    break;
  }
  if (!value)
    return false;
  *out.scalar(rule.target) = std::move(value);
  return true;
}

} // namespace

std::string_view to_string(Transform transform) {
  switch (transform) {
  case Transform::Identity: return "Identity";
  case Transform::DateTruncate: return "DateTruncate";
  case Transform::SpdxNormalize: return "SpdxNormalize";
  case Transform::LanguageMapKeys: return "LanguageMapKeys";
  case Transform::PersonList: return "PersonList";
  case Transform::UrlDerive: return "UrlDerive";
  }
  return "Identity";
}

std::optional<Transform> transform_from_name(std::string_view name) {
  for (Transform t : {Transform::Identity, Transform::DateTruncate, Transform::SpdxNormalize,
                      Transform::LanguageMapKeys, Transform::PersonList, Transform::UrlDerive})
    if (to_string(t) == name)
      return t;
  return std::nullopt;
}

std::string_view to_string(RuleOutcome outcome) {
  switch (outcome) {
  case RuleOutcome::Fired: return "fired";
  case RuleOutcome::Skipped: return "skipped";
  case RuleOutcome::Shadowed: return "shadowed";
  }
  return "skipped";
}

CrosswalkTable::CrosswalkTable(std::vector<MappingRule> rules) : rules_(std::move(rules)) {
  std::set<Field> targets;
  for (const auto &rule : rules_) {
    std::string where = "rule '" + rule.source_path + "' -> " + std::string(field_name(rule.target));
    if (rule.source_path.empty())
      malformed(where + ": empty source_path");
    if ((rule.transform == Transform::PersonList) != (rule.target == Field::Persons))
      malformed(where + ": persons are filled by PersonList rules only");
    if (rule.transform == Transform::LanguageMapKeys && !is_list_field(rule.target))
      malformed(where + ": LanguageMapKeys needs a list target");
    if ((rule.transform == Transform::UrlDerive || rule.transform == Transform::DateTruncate ||
         rule.transform == Transform::SpdxNormalize) &&
        is_list_field(rule.target))
      malformed(where + ": transform needs a single-valued target");
    for (const auto &[attribute, keys] : rule.person_fields)
      if (!kPersonAttributes.count(attribute) || keys.empty())
        malformed(where + ": bad person field '" + attribute + "'");
    if (!targets.insert(rule.target).second && !rule.fallback)
      malformed(where + ": target already mapped; mark the rule as fallback");
  }
}

CrosswalkTable CrosswalkTable::from_json(std::string_view text) {
  Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_array())
    malformed("crosswalk table must be a JSON array of rules");
  std::vector<MappingRule> rules;
  for (const auto &entry : doc) {
    if (!entry.is_object())
      malformed("crosswalk rule must be an object");
    MappingRule rule;
    try {
      rule.source_path = entry.at("source_path").get<std::string>();
      std::string target = entry.at("target").get<std::string>();
      auto field = field_from_name(target);
      if (!field)
        malformed("unknown crosswalk target '" + target + "'");
      rule.target = *field;
      std::string transform = entry.value("transform", std::string("Identity"));
      auto parsed = transform_from_name(transform);
      if (!parsed)
        malformed("unknown transform '" + transform + "'");
      rule.transform = *parsed;
      rule.fallback = entry.value("fallback", false);
      rule.suffix = entry.value("suffix", std::string());
      if (entry.contains("role")) {
        auto role = role_from_name(entry["role"].get<std::string>());
        if (!role)
          malformed("unknown role in crosswalk rule");
        rule.role = *role;
      }
      if (entry.contains("person_fields"))
        for (const auto &[attribute, keys] : entry["person_fields"].items())
          rule.person_fields[attribute] = keys.is_array()
                                              ? keys.get<std::vector<std::string>>()
                                              : std::vector<std::string>{keys.get<std::string>()};
    } catch (const Json::exception &e) {
      malformed(std::string("invalid crosswalk rule: ") + e.what());
    }
    rules.push_back(std::move(rule));
  }
  return CrosswalkTable(std::move(rules));
}

Json CrosswalkTable::to_json() const {
  Json out = Json::array();
  for (const auto &rule : rules_) {
    Json entry = {{"source_path", rule.source_path},
                  {"target", field_name(rule.target)},
                  {"transform", to_string(rule.transform)}};
    if (rule.fallback)
      entry["fallback"] = true;
    if (rule.transform == Transform::PersonList) {
      entry["role"] = to_string(rule.role);
      entry["person_fields"] = rule.person_fields;
    }
    if (rule.transform == Transform::UrlDerive)
      entry["suffix"] = rule.suffix;
    out.push_back(std::move(entry));
  }
  return out;
}

const CrosswalkTable &builtin_github_table() {
  static const CrosswalkTable table = CrosswalkTable::from_json(kGitHubTable);
  return table;
}

const CrosswalkTable &builtin_cff_table() {
  static const CrosswalkTable table = CrosswalkTable::from_json(kCffTable);
  return table;
}

std::vector<Field> populated_fields(const CodeMetaRecord &record) {
  std::vector<Field> out;
  for (Field field : kAllFields)
    if (record.has(field))
      out.push_back(field);
  return out;
}

PartialRecord apply_crosswalk(const SourceRecord &src, const CrosswalkTables &tables) {
  PartialRecord out;
  out.source = src.source;

  if (src.source == SourceKind::CodeMetaFile) {
    out.record = codemeta_from_json(src.data, &out.issues);
    for (Field field : populated_fields(out.record))
      out.report.push_back({std::string(field_name(field)), field, RuleOutcome::Fired});
    return out;
  }

  const CrosswalkTable &table = src.source == SourceKind::GitHubApi ? tables.github : tables.cff;
  for (const auto &rule : table.rules()) {
    RuleOutcome outcome = RuleOutcome::Skipped;
    if (rule.fallback && out.record.has(rule.target)) {
      outcome = RuleOutcome::Shadowed;
    } else if (const Json *node = resolve_path(src.data, rule.source_path)) {
      if (apply_rule(rule, *node, out.record))
        outcome = RuleOutcome::Fired;
    }
    out.report.push_back({rule.source_path, rule.target, outcome});
  }
  return out;
}

} // namespace smecs
