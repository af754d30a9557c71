#pragma once

#include <random>
#include <string>
#include <vector>

#include "smecs/crosswalk.hpp"
#include "smecs/model.hpp"

namespace gen {

using Rng = std::mt19937_64;

std::string word(Rng &rng);
std::string phrase(Rng &rng, int max_words = 4);
std::string iso_date(Rng &rng);
std::string https_url(Rng &rng);
std::string spdx_id(Rng &rng);

// A population of people whose ids, emails and names never collide, so
// identity grouping has exactly one right answer.
struct Individual {
  std::string id;
  std::string email;
  std::string given;
  std::string family;
  std::string affiliation;
};

std::vector<Individual> population(Rng &rng, std::size_t count);

// One sighting of `who`: a random, non-empty subset of its identifying
// attributes.
smecs::Person sighting(Rng &rng, const Individual &who, smecs::Role role);

// A sparse record as a crosswalk would produce it for `source`.
smecs::PartialRecord partial(Rng &rng, smecs::SourceKind source,
                             const std::vector<Individual> &people);

// A record in the shape the exporter produces and the parser returns:
// name set, SPDX license id, ISO dates, unique list entries, distinct
// people ordered authors first.
smecs::CodeMetaRecord exportable_record(Rng &rng);

} // namespace gen
