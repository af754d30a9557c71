#include "smecs/merge.hpp"

#include <algorithm>

namespace smecs {

namespace {

struct Entry {
  const Person *person;
  SourceKind source;
};

struct PersonGroup {
  std::vector<std::size_t> members; // indices into the precedence-sorted entries
  Person merged;
  std::set<SourceKind> sources;
};

void fill(std::optional<std::string> &slot, const std::optional<std::string> &value) {
  if (!slot && value)
    slot = value;
}

// Folds members in processing order: the first non-empty value wins.
void rebuild(PersonGroup &group, const std::vector<Entry> &entries) {
  std::sort(group.members.begin(), group.members.end());
  Person merged;
  group.sources.clear();
  for (std::size_t index : group.members) {
    const Person &p = *entries[index].person;
    fill(merged.given_name, p.given_name);
    fill(merged.family_name, p.family_name);
    fill(merged.email, p.email);
    fill(merged.id, p.id);
    fill(merged.affiliation, p.affiliation);
    merged.roles |= p.roles;
    group.sources.insert(entries[index].source);
  }
  group.merged = std::move(merged);
}

std::vector<PersonGroup> group_persons(const std::vector<PersonSource> &lists,
                                       const Precedence &order) {
  std::vector<Entry> entries;
  for (const auto &[persons, source] : lists)
    for (const Person &p : persons)
      entries.push_back({&p, source});
  std::stable_sort(entries.begin(), entries.end(), [&order](const Entry &a, const Entry &b) {
    return precedence_rank(order, a.source) < precedence_rank(order, b.source);
  });

  std::vector<PersonGroup> groups;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto match = std::find_if(groups.begin(), groups.end(), [&](const PersonGroup &g) {
      return same_identity(g.merged, *entries[i].person);
    });
    if (match == groups.end()) {
      groups.emplace_back();
      match = std::prev(groups.end());
    }
    match->members.push_back(i);
    rebuild(*match, entries);
  }

  // Absorbing entries can give a group a new id or email that now matches
  // another group; collapse until no two groups match.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < groups.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        if (same_identity(groups[i].merged, groups[j].merged)) {
          groups[i].members.insert(groups[i].members.end(), groups[j].members.begin(),
                                   groups[j].members.end());
          rebuild(groups[i], entries);
          groups.erase(groups.begin() + static_cast<long>(j));
          changed = true;
          break;
        }
      }
    }
  }

  std::stable_partition(groups.begin(), groups.end(), [](const PersonGroup &g) {
    return g.merged.roles.has(Role::Author);
  });
  return groups;
}

} // namespace

std::size_t precedence_rank(const Precedence &order, SourceKind kind) {
  auto it = std::find(order.begin(), order.end(), kind);
  return static_cast<std::size_t>(it - order.begin());
}

std::vector<Person> merge_person_lists(const std::vector<PersonSource> &lists,
                                       const Precedence &order) {
  std::vector<Person> out;
  for (auto &group : group_persons(lists, order))
    out.push_back(std::move(group.merged));
  return out;
}

MergeResult merge_sources(const std::vector<PartialRecord> &parts, const Precedence &order) {
  std::vector<const PartialRecord *> ranked;
  for (const auto &part : parts)
    ranked.push_back(&part);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&order](const PartialRecord *a, const PartialRecord *b) {
                     return precedence_rank(order, a->source) < precedence_rank(order, b->source);
                   });

  MergeResult result;
  for (Field field : kAllFields) {
    if (field == Field::Persons)
      continue;
    for (const PartialRecord *part : ranked) {
      if (!part->record.has(field))
        continue;
      if (const auto *values = part->record.list(field))
        *result.record.list(field) = *values;
      else
        *result.record.scalar(field) = *part->record.scalar(field);
      result.provenance.fields[std::string(field_name(field))] = part->source;
      break;
    }
  }

  for (const PartialRecord *part : ranked) {
    for (const auto &[key, value] : part->record.extras.items()) {
      if (result.record.extras.contains(key))
        continue;
      result.record.extras[key] = value;
      result.provenance.fields[key] = part->source;
    }
  }

  std::vector<PersonSource> lists;
  for (const PartialRecord *part : ranked)
    lists.emplace_back(part->record.persons, part->source);
  for (auto &group : group_persons(lists, order)) {
    result.provenance.persons[identity_key(group.merged)].insert(group.sources.begin(),
                                                             group.sources.end());
    result.record.persons.push_back(std::move(group.merged));
  }
  return result;
}

StatusMap classify_fields(const CodeMetaRecord &record, const ProvenanceMap &provenance,
                          const std::set<Field> &edits, const std::set<Field> &review_fields) {
  StatusMap statuses;
  for (Field field : kAllFields) {
    CurationStatus status;
    if (!record.has(field)) {
      status = CurationStatus::Missing;
    } else if (edits.count(field)) {
      status = CurationStatus::Edited;
    } else {
      bool extracted = field == Field::Persons
                           ? !provenance.persons.empty()
                           : provenance.fields.count(std::string(field_name(field))) > 0;
      if (!extracted)
        status = CurationStatus::Edited;
      else if (review_fields.count(field))
        status = CurationStatus::Review;
      else
        status = CurationStatus::Extracted;
    }
    statuses[field] = status;
  }
  return statuses;
}

} // namespace smecs
