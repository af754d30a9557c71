#pragma once

// Per-rule fixtures cut out of a curated source record: the positive
// fixture keeps only the rule's source path, the negative one removes every
// path that feeds the rule's target.

#include <string>
#include <vector>

#include "smecs/crosswalk.hpp"
#include "smecs/harvest.hpp"

namespace conformance {

smecs::Json keep_only(const smecs::Json &data, const std::string &path);
smecs::Json remove_path(const smecs::Json &data, const std::string &path);

struct RuleCheck {
  std::string table;
  std::string source_path;
  smecs::Field target;
  std::string on_curated;  // outcome on the untouched record
  std::string on_positive; // outcome with only this rule's input
  std::string on_negative; // outcome with this target's inputs removed
  bool ok = false;
};

std::vector<RuleCheck> check_table(const std::string &name, const smecs::CrosswalkTable &table,
                                   const smecs::SourceRecord &curated);

// The fired rules' targets equal the populated fields, one rule per field.
bool report_bijects(const smecs::PartialRecord &part);

smecs::RuleOutcome outcome_of(const smecs::PartialRecord &part, const smecs::MappingRule &rule);

} // namespace conformance
