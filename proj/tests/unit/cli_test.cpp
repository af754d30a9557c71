#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int exit_code;
  std::string output; // stdout and stderr interleaved
};

Run run(const std::string &args) {
  std::string command = std::string(SMECS_CLI_PATH) + " " + args + " 2>&1";
  FILE *pipe = popen(command.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buffer{};
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    out.append(buffer.data(), n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("smecs-cli-" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(dir); }
  ~Scratch() { fs::remove_all(dir); }
};

const std::string kFixtures = std::string(" --fixtures ") + SMECS_TEST_FIXTURES;

} // namespace

TEST_CASE("extract writes codemeta.json that validates") {
  Scratch s;
  auto out = s.dir / "codemeta.json";
  auto r = run("extract --url https://github.com/acme/demo" + kFixtures + " --out " + out.string());
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  CHECK(slurp(out).find("\"@context\"") != std::string::npos);
  CHECK(r.output.find("CffFile: harvested") != std::string::npos);
  CHECK(r.output.find("license: Extracted") != std::string::npos);
  CHECK(run("validate " + out.string()).exit_code == 0);
}

TEST_CASE("extract is byte-for-byte deterministic and can stream") {
  Scratch s;
  auto a = s.dir / "a.json";
  auto b = s.dir / "b.json";
  REQUIRE(run("extract --url https://github.com/acme/demo" + kFixtures + " --out " + a.string()).exit_code == 0);
  REQUIRE(run("extract --url https://github.com/acme/demo" + kFixtures + " --out " + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  auto streamed = run("extract --url https://github.com/acme/demo" + kFixtures + " --out - 2>/dev/null");
  CHECK(streamed.output.rfind(slurp(a), 0) == 0);
}

TEST_CASE("extract exit codes") {
  Scratch s;
  auto out = (s.dir / "x.json").string();
  auto bad = run("extract --url ftp://x" + kFixtures + " --out " + out);
  CHECK(bad.exit_code == 3);
  CHECK(bad.output.find("usage") != std::string::npos);
  auto missing = run("extract --url https://github.com/acme/nothere" + kFixtures + " --out " + out);
  CHECK(missing.exit_code == 2);
  CHECK(missing.output.find("not found") != std::string::npos);
  CHECK(run("extract" + kFixtures).exit_code == 3);
  CHECK(run("frobnicate").exit_code == 3);
}

TEST_CASE("extract never prints the token") {
  Scratch s;
  auto out = (s.dir / "x.json").string();
  const std::string secret = "ghp_cli_secret_value_42";
  for (const char *repo : {"demo", "nothere", "private", "limited", "broken", "garbled", "offline"}) {
    auto r = run(std::string("extract --url https://github.com/acme/") + repo + kFixtures + " --out " + out +
                 " --token " + secret);
    CHECK(r.output.find(secret) == std::string::npos);
    auto env = run(std::string("extract --url https://github.com/acme/") + repo + kFixtures + " --out " + out);
    CHECK(env.output.find(secret) == std::string::npos);
  }
}

TEST_CASE("extract report file") {
  Scratch s;
  auto out = s.dir / "c.json";
  auto report = s.dir / "report.json";
  REQUIRE(run("extract --url https://github.com/acme/demo" + kFixtures + " --out " + out.string() + " --report " +
              report.string())
              .exit_code == 0);
  std::string text = slurp(report);
  CHECK(text.find("\"statuses\"") != std::string::npos);
  CHECK(text.find("\"provenance\"") != std::string::npos);
}

TEST_CASE("validate exit codes") {
  Scratch s;
  auto fake = s.dir / "fake.json";
  std::ofstream(fake) << R"({"name": "x", "license": "MIT-FAKE"})";
  auto r = run("validate " + fake.string());
  CHECK(r.exit_code == 1);
  CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 1);
  CHECK(r.output.find("license") != std::string::npos);

  auto broken = s.dir / "broken.json";
  std::ofstream(broken) << "{oops";
  CHECK(run("validate " + broken.string()).exit_code == 2);
  CHECK(run("validate " + (s.dir / "absent.json").string()).exit_code == 2);
}

TEST_CASE("refresh-vocab from local files") {
  Scratch s;
  auto licenses = s.dir / "spdx.json";
  std::ofstream(licenses) << R"({"licenseListVersion": "test", "licenses": [
    {"licenseId": "MIT", "name": "MIT License", "isDeprecatedLicenseId": false}]})";
  auto languages = s.dir / "langs.txt";
  std::ofstream(languages) << "C\nRust\n";
  auto out = s.dir / "vocab";
  auto r = run("refresh-vocab --licenses-from-file " + licenses.string() + " --languages-from-file " +
               languages.string() + " --out-dir " + out.string());
  INFO(r.output);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(out / "licenses.json"));
  CHECK(slurp(out / "languages.json").find("Rust") != std::string::npos);

  std::ofstream(s.dir / "empty.json") << "";
  CHECK(run("refresh-vocab --licenses-from-file " + (s.dir / "empty.json").string() + " --out-dir " + out.string())
            .exit_code == 2);
  // The earlier snapshot survives a failed refresh.
  CHECK(slurp(out / "licenses.json").find("MIT") != std::string::npos);
}
