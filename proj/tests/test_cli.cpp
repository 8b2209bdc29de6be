// Copyright 2026 The blindlattice authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blindlattice/cli.hpp"

namespace bl = blindlattice;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

// In-process dispatch with captured streams, so assertions can look at both
// the exit code and the human summary.
CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
  CliResult result;
  try {
    result.code = bl::cli::dispatch(args);
  } catch (...) {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    throw;
  }
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json slurp_json(const fs::path& path) { return json::parse(slurp(path)); }

// Fresh scratch file per name; removed when the holder goes out of scope.
struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name)
      : path(fs::temp_directory_path() / ("blindlattice_test_" + name)) {
    fs::remove(path);
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
  [[nodiscard]] std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("verify-gates exits zero and reports every gate ok") {
  TempFile report("verify.json");
  const CliResult r = run_cli({"verify-gates", "--out", report.str()});
  CHECK(r.code == 0);
  CHECK(r.out.find("verify CNOT") != std::string::npos);

  const json j = slurp_json(report.path);
  CHECK(j["command"] == "verify-gates");
  CHECK(j["all_ok"] == true);
  REQUIRE(j["rows"].size() == 8);
  for (const auto& row : j["rows"]) {
    CHECK(row["ok"] == true);
    CHECK(row["max_deviation"].get<double>() <= 1e-9);
  }
}

TEST_CASE("bounds json reproduces the feasible interval and the findings") {
  TempFile report("bounds.json");
  const CliResult r =
      run_cli({"bounds", "--q", "0.5", "--epsilon", "0.2", "--out", report.str()});
  CHECK(r.code == 0);

  const json j = slurp_json(report.path);
  CHECK(j["report"]["q"].get<double>() == doctest::Approx(0.5));
  CHECK(j["report"]["xi1"].get<double>() == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(j["report"]["feasible_epsilon"][0].get<double>() == doctest::Approx(0.035).epsilon(0.03));
  CHECK(j["report"]["feasible_epsilon"][1].get<double>() == doctest::Approx(0.384).epsilon(0.03));
  CHECK(j["stationary"].get<double>() == doctest::Approx(0.1757).epsilon(1e-2));
  CHECK(j["minimum_value"].get<double>() == doctest::Approx(-1.1772).epsilon(1e-3));
  REQUIRE(j["consistency"].size() == 2);
  CHECK(j["consistency"][0]["id"] == "xi3_expansion_mismatch");
  CHECK(j["consistency"][1]["id"] == "q_bound_negative_on_feasible_range");
}

TEST_CASE("bounds csv sweep writes the pinned header") {
  TempFile report("bounds.csv");
  const CliResult r = run_cli({"bounds", "--format", "csv", "--out", report.str()});
  CHECK(r.code == 0);

  const std::string text = slurp(report.path);
  CHECK(text.rfind("q,epsilon,xi1,xi2,xi3,q_lb,feasible\n", 0) == 0);
  const auto rows = std::count(text.begin(), text.end(), '\n');
  CHECK(rows == 1 + 21 * 49);  // header plus the q x epsilon grid
}

TEST_CASE("blindness meets the mixing identity and angle uniformity") {
  TempFile report("blind.json");
  const CliResult r =
      run_cli({"blindness", "--trials", "400", "--seed", "3", "--out", report.str()});
  CHECK(r.code == 0);

  const json j = slurp_json(report.path);
  CHECK(j["max_abs_deviation"].get<double>() <= 1e-12);
  CHECK(j["angle_uniform_p"].get<double>() > 0.01);
  CHECK(j["trials"].get<int>() == 400);
  REQUIRE(j["angle_counts"].size() == 8);
}

TEST_CASE("run reports are deterministic and embed seed and config") {
  TempFile a("run_a.json"), b("run_b.json");
  const std::vector<std::string> base = {"run",    "--circuit", "H,T", "--input", "0+",
                                         "--seed", "5"};
  std::vector<std::string> first = base;
  first.insert(first.end(), {"--out", a.str()});
  std::vector<std::string> second = base;
  second.insert(second.end(), {"--out", b.str()});

  const CliResult ra = run_cli(first);
  const CliResult rb = run_cli(second);
  CHECK(ra.code == 0);
  CHECK(rb.code == 0);
  CHECK(ra.out.find("strategy=honest") != std::string::npos);
  CHECK(slurp(a.path) == slurp(b.path));  // byte-identical reports

  const json j = slurp_json(a.path);
  CHECK(j["command"] == "run");
  CHECK(j["seed"].get<std::uint64_t>() == 5);
  CHECK(j["config"]["circuit"] == json::array({"H", "T"}));
  CHECK(j["config"]["q"].get<double>() == doctest::Approx(0.5));
  CHECK(j["replay_ok"] == true);
  CHECK(j["decision"]["accept"].is_boolean());
}

TEST_CASE("run emits jsonl transcripts and other subcommands refuse the format") {
  TempFile a("run_a.jsonl"), b("run_b.jsonl");
  const CliResult ra = run_cli({"run", "--circuit", "X", "--seed", "11", "--format", "jsonl",
                                "--out", a.str()});
  const CliResult rb = run_cli({"run", "--circuit", "X", "--seed", "11", "--format", "jsonl",
                                "--out", b.str()});
  CHECK(ra.code == 0);
  CHECK(slurp(a.path) == slurp(b.path));

  std::istringstream lines(slurp(a.path));
  std::string line;
  REQUIRE(std::getline(lines, line));
  const json meta = json::parse(line);
  CHECK(meta["type"] == "meta");
  CHECK(meta["seed"].get<std::uint64_t>() == 11);

  std::string last;
  while (std::getline(lines, line)) last = line;
  CHECK(json::parse(last)["type"] == "decision");

  const CliResult bad = run_cli({"verify-gates", "--format", "jsonl"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("jsonl") != std::string::npos);
}

TEST_CASE("usage errors exit with code two") {
  CHECK(run_cli({"run", "--circuit", "BOGUS"}).code == 2);
  CHECK(run_cli({"run", "--strategy", "nosuch"}).code == 2);
  CHECK(run_cli({"run", "--strategy", "flip:p=abc"}).code == 2);
  CHECK(run_cli({"run", "--strategy", "flip:p=1.5"}).code == 2);
  CHECK(run_cli({"run", "--strategy", "flip:x=0.5"}).code == 2);
  CHECK(run_cli({"run", "--q", "1.5"}).code == 2);
  CHECK(run_cli({"run", "--input", "012"}).code == 2);
  CHECK(run_cli({"run", "--input", "0q"}).code == 2);
  CHECK(run_cli({}).code == 2);                  // missing subcommand
  CHECK(run_cli({"frobnicate"}).code == 2);      // unknown subcommand
  CHECK(run_cli({"run", "--trials", "0"}).code == 2);
}

TEST_CASE("unwritable report paths exit with code one") {
  const CliResult r = run_cli({"run", "--out", "/nonexistent/dir/report.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("report") != std::string::npos);
}

TEST_CASE("help prints usage and exits zero") {
  const CliResult r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("Usage") != std::string::npos);
  CHECK(r.out.find("Subcommands") != std::string::npos);
  CHECK(r.out.find("BLINDLATTICE_SEED") != std::string::npos);
}

TEST_CASE("attack table leads with honest and flags the deterministic flip") {
  TempFile report("attack.json");
  const CliResult r = run_cli({"attack", "--q", "0", "--trials", "200", "--seed", "2",
                               "--strategy", "flip:p=1.0", "--out", report.str()});
  CHECK(r.code == 0);

  const json j = slurp_json(report.path);
  CHECK(j["command"] == "attack");
  CHECK(j["seed"].get<std::uint64_t>() == 2);
  CHECK(j["config"]["q"].get<double>() == doctest::Approx(0.0));
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["strategy"] == "honest");
  CHECK(j["rows"][0]["estimate"]["rate"].get<double>() == doctest::Approx(1.0));
  CHECK(j["rows"][1]["strategy"] == "flip_outcomes");
  CHECK(j["rows"][1]["estimate"]["rate"].get<double>() == doctest::Approx(0.0));
  CHECK(j["rows"][1]["estimate"]["trials"].get<int>() == 200);
}

TEST_CASE("attack rate never rises with the flip probability") {
  TempFile report("attack_mono.csv");
  const CliResult r = run_cli({"attack", "--q", "0.5", "--trials", "600", "--seed", "4",
                               "--strategy", "flip:p=0.25", "--strategy", "flip:p=0.5",
                               "--strategy", "flip:p=1.0", "--format", "csv", "--out",
                               report.str()});
  CHECK(r.code == 0);

  std::istringstream lines(slurp(report.path));
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "strategy,param,q,trials,accepts,rate,ci_low,ci_high");

  std::vector<double> rates;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> row;
    while (std::getline(fields, field, ',')) row.push_back(field);
    REQUIRE(row.size() == 8);
    rates.push_back(std::stod(row[5]));
  }
  REQUIRE(rates.size() == 4);  // honest plus the three flips, honest first
  for (std::size_t i = 1; i < rates.size(); ++i)
    CHECK(rates[i] <= rates[i - 1] + 0.05);  // small Monte Carlo slack
  CHECK(rates.front() > 0.9);
  CHECK(rates.back() < 0.1);
}

TEST_CASE("lattice export matches the builder and covers optional units") {
  TempFile report("lattice.json");
  const CliResult r = run_cli({"lattice", "--rows", "2", "--cols", "5", "--circuit", "H,CNOT",
                               "--out", report.str()});
  CHECK(r.code == 0);
  CHECK(r.out.find("edges=10") != std::string::npos);

  const json j = slurp_json(report.path);
  CHECK(j["m"].get<int>() == 2);
  CHECK(j["n"].get<int>() == 5);
  CHECK(j["edges"].size() == 10);
  REQUIRE(j["units"].size() == 2);
  CHECK(j["units"][0]["gate"] == "H");
  CHECK(j["units"][1]["gate"] == "CNOT");

  // Without --out the bundle goes to stdout; without --circuit units are empty.
  const CliResult dump = run_cli({"lattice", "--rows", "3", "--cols", "4"});
  CHECK(dump.code == 0);
  CHECK(dump.out.find("\"m\": 3") != std::string::npos);
  CHECK(dump.out.find("\"units\": []") != std::string::npos);
}

TEST_CASE("environment seed is the fallback when no flag is given") {
  TempFile report("env_run.json");
  REQUIRE(setenv("BLINDLATTICE_SEED", "42", 1) == 0);
  const CliResult r = run_cli({"run", "--out", report.str()});
  REQUIRE(unsetenv("BLINDLATTICE_SEED") == 0);
  CHECK(r.code == 0);
  CHECK(slurp_json(report.path)["seed"].get<std::uint64_t>() == 42);
}

TEST_CASE("config file supplies defaults and explicit flags beat it") {
  TempFile conf("cli.conf");
  {
    std::ofstream out(conf.path);
    out << "seed=99\ncircuit=X\n# comment\nq=0.25\n";
  }

  TempFile defaults("cfg_run.json");
  const CliResult r =
      run_cli({"--config", conf.str(), "run", "--out", defaults.str()});
  CHECK(r.code == 0);
  const json j = slurp_json(defaults.path);
  CHECK(j["seed"].get<std::uint64_t>() == 99);
  CHECK(j["config"]["circuit"] == json::array({"X"}));
  CHECK(j["config"]["q"].get<double>() == doctest::Approx(0.25));

  TempFile overridden("cfg_run2.json");
  const CliResult r2 =
      run_cli({"--config", conf.str(), "run", "--seed", "7", "--out", overridden.str()});
  CHECK(r2.code == 0);
  const json j2 = slurp_json(overridden.path);
  CHECK(j2["seed"].get<std::uint64_t>() == 7);
  CHECK(j2["config"]["circuit"] == json::array({"X"}));  // file default survives
}

TEST_CASE("argv entry point mirrors the vector form") {
  const char* argv[] = {"blindlattice", "bounds", "--q", "0.25"};
  std::ostringstream out;
  std::streambuf* old = std::cout.rdbuf(out.rdbuf());
  const int code = bl::cli::dispatch(4, argv);
  std::cout.rdbuf(old);
  CHECK(code == 0);
  CHECK(out.str().find("feasible_epsilon") != std::string::npos);
}
