// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <spdlog/sinks/ostream_sink.h>

#include "conformance.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "smecs/error.hpp"
#include "smecs/log.hpp"
#include "smecs/merge.hpp"
#include "smecs/service.hpp"

using namespace smecs;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string &why) {
    if (pass)
      detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<PartialRecord> random_parts(gen::Rng &rng) {
  auto people = gen::population(rng, 1 + rng() % 6);
  std::vector<PartialRecord> parts;
  for (SourceKind kind : {SourceKind::GitHubApi, SourceKind::CffFile, SourceKind::CodeMetaFile})
    if (rng() % 3 != 0)
      parts.push_back(gen::partial(rng, kind, people));
  std::shuffle(parts.begin(), parts.end(), rng);
  return parts;
}

Verdict merge_oracle() {
  Verdict v;
  gen::Rng rng(20240611);
  const int cases = 250;
  auto start = Clock::now();
  for (int i = 0; i < cases && v.pass; ++i) {
    auto parts = random_parts(rng);
    auto got = merge_sources(parts);
    auto want = oracle::precedence_merge(parts, default_precedence());
    if (!(got.record == want.record))
      v.fail("record differs in case " + std::to_string(i));
    if (got.provenance.fields != want.winners)
      v.fail("field provenance differs in case " + std::to_string(i));
    std::vector<PersonSource> lists;
    for (const auto &p : parts)
      lists.emplace_back(p.record.persons, p.source);
    auto persons = merge_person_lists(lists);
    if (persons.size() != want.persons.size()) {
      v.fail("person count differs in case " + std::to_string(i));
      continue;
    }
    for (std::size_t k = 0; k < persons.size(); ++k) {
      if (!(persons[k] == want.persons[k].person))
        v.fail("person " + std::to_string(k) + " differs in case " + std::to_string(i));
      auto it = got.provenance.persons.find(identity_key(want.persons[k].person));
      if (it == got.provenance.persons.end() ||
          std::vector<SourceKind>(it->second.begin(), it->second.end()) != want.persons[k].sources)
        v.fail("person sources differ in case " + std::to_string(i));
    }
  }
  double elapsed = seconds_since(start);
  if (elapsed >= 5.0)
    v.fail("took " + std::to_string(elapsed) + " s");
  if (v.pass)
    v.detail = std::to_string(cases) + " cases in " + std::to_string(elapsed) + " s";
  return v;
}

Verdict round_trip() {
  Verdict v;
  gen::Rng rng(77);
  const int cases = 250;
  auto start = Clock::now();
  for (int i = 0; i < cases && v.pass; ++i) {
    auto record = gen::exportable_record(rng);
    std::string first = export_codemeta(record);
    auto parsed = parse_codemeta(first);
    if (!(parsed == record))
      v.fail("parse(export(r)) != r in case " + std::to_string(i));
    if (export_codemeta(parsed) != first)
      v.fail("second export differs in case " + std::to_string(i));
  }
  double elapsed = seconds_since(start);
  if (elapsed >= 5.0)
    v.fail("took " + std::to_string(elapsed) + " s");
  if (v.pass)
    v.detail = std::to_string(cases) + " records in " + std::to_string(elapsed) + " s";
  return v;
}

Verdict crosswalk_conformance() {
  Verdict v;
  FixtureTransport transport(SMECS_TEST_FIXTURES);
  auto harvested = harvest_all(parse_repo_url("https://github.com/acme/demo"), {}, transport);
  if (harvested.records.size() != 3) {
    v.fail("curated fixture yielded " + std::to_string(harvested.records.size()) + " sources");
    return v;
  }
  std::size_t rules = 0;
  for (const auto &[name, table, record] :
       {std::tuple{"github", &builtin_github_table(), &harvested.records[0]},
        std::tuple{"cff", &builtin_cff_table(), &harvested.records[1]}}) {
    for (const auto &check : conformance::check_table(name, *table, *record)) {
      ++rules;
      if (!check.ok)
        v.fail(check.table + " " + check.source_path + ": curated=" + check.on_curated +
               " positive=" + check.on_positive + " negative=" + check.on_negative);
    }
  }
  for (const auto &record : harvested.records)
    if (!conformance::report_bijects(apply_crosswalk(record)))
      v.fail("report does not biject for source " + std::string(to_string(record.source)));
  if (v.pass)
    v.detail = std::to_string(rules) + " rules checked";
  return v;
}

Verdict classification_table() {
  Verdict v;
  enum class State { Absent, Extracted, Edited };
  // Exercise both the default review set and a set with every field
  // flipped, so each field is seen as review-field and normal-field.
  std::set<Field> flipped;
  for (Field f : kAllFields)
    if (!default_review_fields().count(f))
      flipped.insert(f);
  int rows = 0;
  for (const auto &review_fields : {default_review_fields(), flipped}) {
    for (Field field : kAllFields) {
      for (State state : {State::Absent, State::Extracted, State::Edited}) {
        CodeMetaRecord record;
        ProvenanceMap provenance;
        std::set<Field> edits;
        if (state != State::Absent) {
          if (field == Field::Persons) {
            Person p;
            p.family_name = "Doe";
            p.roles = {Role::Author};
            record.persons = {p};
            if (state == State::Extracted)
              provenance.persons[identity_key(p)] = {SourceKind::CffFile};
          } else {
            if (auto *values = record.list(field))
              values->push_back("v");
            else
              *record.scalar(field) = "v";
            if (state == State::Extracted)
              provenance.fields[std::string(field_name(field))] = SourceKind::GitHubApi;
          }
          if (state == State::Edited)
            edits.insert(field);
        }
        CurationStatus expected = state == State::Absent   ? CurationStatus::Missing
                                  : state == State::Edited ? CurationStatus::Edited
                                  : review_fields.count(field) ? CurationStatus::Review
                                                               : CurationStatus::Extracted;
        auto statuses = classify_fields(record, provenance, edits, review_fields);
        ++rows;
        if (statuses.size() != kAllFields.size())
          v.fail("status map does not cover every field");
        for (Field other : kAllFields) {
          auto want = other == field ? expected : CurationStatus::Missing;
          if (statuses.at(other) != want)
            v.fail(std::string(field_name(other)) + " wrong while testing " + std::string(field_name(field)));
        }
      }
    }
  }
  if (v.pass)
    v.detail = std::to_string(rows) + " rows";
  return v;
}

Verdict vocabulary() {
  Verdict v;
  auto vocab = load_vocabulary_dir(SMECS_TEST_VOCAB_DIR);
  for (const char *id : {"MIT", "AGPL-3.0"})
    if (!vocab.licenses.resolve(id))
      v.fail(std::string(id) + " does not resolve");
  gen::Rng rng(50);
  const char *alphabet = "abcdefghijklmnopqrstuvwxyz0123456789.-+ ";
  for (int i = 0; i < 50 && v.pass; ++i) {
    const Vocabulary &target = i % 2 ? vocab.languages : vocab.licenses;
    std::string query;
    if (rng() % 2) {
      // Slice of a real id or label, with random casing.
      const auto &entry = target.entries()[rng() % target.size()];
      const std::string &source = rng() % 2 ? entry.id : entry.label;
      std::size_t from = rng() % source.size();
      query = source.substr(from, 1 + rng() % 4);
      for (char &c : query)
        if (rng() % 2)
          c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    } else {
      for (std::size_t n = 1 + rng() % 3; n > 0; --n)
        query += alphabet[rng() % 40];
    }
    std::size_t limit = 1 + rng() % 25;
    auto got = filter_vocabulary(target, query, limit);
    if (got != oracle::scan_filter(target, query, limit))
      v.fail("query '" + query + "' differs from the oracle");
    if (got != filter_vocabulary(target, query, limit))
      v.fail("query '" + query + "' is not deterministic");
  }
  if (v.pass)
    v.detail = "50 queries";
  return v;
}

struct Run {
  int exit_code;
  std::string output;
};

Run run_cli(const std::string &args) {
  std::string command = std::string(SMECS_CLI_PATH) + " " + args + " 2>&1";
  Run result{-1, ""};
  FILE *pipe = popen(command.c_str(), "r");
  if (!pipe)
    return result;
  std::array<char, 4096> buffer{};
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir(const std::string &name) {
  auto dir = fs::temp_directory_path() / ("smecs-acceptance-" + std::to_string(::getpid())) / name;
  fs::create_directories(dir);
  return dir;
}

Verdict offline_and_secrecy() {
  Verdict v;
  const std::string user_secret = "ghp_userSecretToken0123456789";
  const std::string server_secret = "ghp_serverDefaultToken9876543210";

  std::ostringstream captured;
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(captured);
  auto log = logger();
  auto previous_level = log->level();
  auto previous_sinks = log->sinks();
  log->sinks() = {sink};
  log->set_level(spdlog::level::trace);

  auto session_dir = scratch_dir("sessions");
  ServiceConfig config;
  config.default_token = server_secret;
  config.session_dir = session_dir;
  auto transport = std::make_shared<FixtureTransport>(SMECS_TEST_FIXTURES);
  Service service(config, load_vocabulary_dir(SMECS_TEST_VOCAB_DIR), transport);

  std::string errors;
  int paths = 0;
  for (const char *repo : {"demo", "apionly", "noassert", "badbase64", "nothere", "private", "limited",
                           "forbidden", "broken", "garbled", "offline"}) {
    for (const auto &token : {std::optional<std::string>(user_secret), std::optional<std::string>()}) {
      ++paths;
      try {
        auto session = service.create_session(std::string("https://github.com/acme/") + repo, token);
        errors += session_to_json(session).dump();
        errors += service.export_session(session.id);
      } catch (const std::exception &e) {
        errors += e.what();
      }
    }
  }
  log->flush();
  log->sinks() = previous_sinks;
  log->set_level(previous_level);

  // The tokens must actually have been sent, or the check proves nothing.
  bool sent_user = false, sent_server = false;
  for (const auto &request : transport->requests())
    if (const auto *auth = request.header("Authorization")) {
      sent_user |= auth->find(user_secret) != std::string::npos;
      sent_server |= auth->find(server_secret) != std::string::npos;
    }
  if (!sent_user || !sent_server)
    v.fail("fixture requests did not carry both tokens");

  std::string persisted;
  for (const auto &entry : fs::directory_iterator(session_dir))
    persisted += slurp(entry.path());

  std::string cli_output;
  auto out = (scratch_dir("cli-secret") / "x.json").string();
  for (const char *repo : {"demo", "nothere", "private", "limited", "broken", "garbled", "offline"})
    cli_output += run_cli(std::string("extract --url https://github.com/acme/") + repo + " --fixtures " +
                          SMECS_TEST_FIXTURES + " --out " + out + " --token " + user_secret)
                      .output;

  for (const auto &secret : {user_secret, server_secret}) {
    if (captured.str().find(secret) != std::string::npos)
      v.fail("token found in captured log");
    if (errors.find(secret) != std::string::npos)
      v.fail("token found in an error or session view");
    if (persisted.find(secret) != std::string::npos)
      v.fail("token found in a persisted session");
    if (cli_output.find(secret) != std::string::npos)
      v.fail("token found in CLI output");
  }
  if (captured.str().empty())
    v.fail("no log output was captured");
  if (NetworkTransport::instances() != 0)
    v.fail("a network transport was constructed");
  if (v.pass)
    v.detail = std::to_string(paths) + " service paths, " + std::to_string(transport->requests().size()) +
               " fixture requests, no network transport";
  return v;
}

Verdict end_to_end_cli() {
  Verdict v;
  auto dir = scratch_dir("cli");
  auto a = dir / "first.json";
  auto b = dir / "second.json";
  std::string base = std::string("extract --url https://github.com/acme/demo --fixtures ") + SMECS_TEST_FIXTURES;
  auto first = run_cli(base + " --out " + a.string());
  auto second = run_cli(base + " --out " + b.string());
  if (first.exit_code != 0 || second.exit_code != 0)
    v.fail("extract exited " + std::to_string(first.exit_code) + ": " + first.output);
  auto check = run_cli("validate " + a.string());
  if (check.exit_code != 0)
    v.fail("validate exited " + std::to_string(check.exit_code) + ": " + check.output);
  std::string bytes = slurp(a);
  if (bytes.empty() || bytes != slurp(b))
    v.fail("exports differ between runs");
  try {
    if (!parse_codemeta(bytes).name)
      v.fail("export has no name");
  } catch (const Error &e) {
    v.fail(std::string("export does not parse: ") + e.what());
  }
  if (v.pass)
    v.detail = std::to_string(bytes.size()) + " identical bytes, validate exit 0";
  return v;
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"merge matches precedence and identity oracles", merge_oracle},
      {"codemeta round trip and stable re-export", round_trip},
      {"crosswalk rule conformance and report bijection", crosswalk_conformance},
      {"classification truth table", classification_table},
      {"vocabulary resolution and filter oracle", vocabulary},
      {"offline operation and token secrecy", offline_and_secrecy},
      {"end-to-end CLI extract and validate", end_to_end_cli},
  };
  int failures = 0;
  for (const auto &[name, check] : criteria) {
    Verdict verdict;
    try {
      verdict = check();
    } catch (const std::exception &e) {
      verdict.fail(std::string("threw: ") + e.what());
    }
    failures += verdict.pass ? 0 : 1;
    std::cout << (verdict.pass ? "PASS" : "FAIL") << "  " << name;
    if (!verdict.detail.empty())
      std::cout << "  (" << verdict.detail << ")";
    std::cout << "\n";
  }
  std::error_code ignored;
  fs::remove_all(fs::temp_directory_path() / ("smecs-acceptance-" + std::to_string(::getpid())), ignored);
  return failures == 0 ? 0 : 1;
}
