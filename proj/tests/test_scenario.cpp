#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "cocyc/errors.hpp"
#include "cocyc/scenario.hpp"

using namespace cocyc;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

fs::path scenario_dir() { return fs::path(COCYC_SCENARIO_DIR); }

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "cocyc_scenario_tests";
  fs::create_directories(d);
  return d;
}

fs::path write_temp(const std::string& name, const std::string& bytes) {
  const fs::path p = temp_dir() / name;
  std::ofstream f(p, std::ios::binary);
  f << bytes;
  return p;
}

RunOptions in_memory(int workers = 1) {
  RunOptions o;
  o.workers = workers;
  o.write_files = false;
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(COCYC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("verify scenario passes with a structured deterministic report") {
  const fs::path sc = scenario_dir() / "e2_verify.json";
  const RunResult r = run_scenario_file(sc, "verify", in_memory());
  CHECK(r.exit_code == 0);
  CHECK(r.status == "pass");
  CHECK(r.side_files.empty());

  const ojson rep = ojson::parse(r.report_json);
  CHECK(rep.at("schema") == "cocyc-report-1");
  CHECK(rep.at("task") == "verify");
  CHECK(rep.at("seed") == 20260101);
  CHECK(rep.at("status") == "pass");
  CHECK(rep.at("exit_code") == 0);
  CHECK(rep.at("scenario_digest").get<std::string>().size() == 16);
  REQUIRE(rep.at("checks").size() == 3);
  for (const auto& c : rep.at("checks")) CHECK(c.at("status") == "pass");

  const RunResult again = run_scenario_file(sc, "verify", in_memory());
  CHECK(again.report_json == r.report_json);

  // empty expected task accepts the scenario's own declaration
  const RunResult open = run_scenario_file(sc, "", in_memory());
  CHECK(open.report_json == r.report_json);
}

TEST_CASE("seed override changes the report seed but not the digest") {
  const fs::path sc = scenario_dir() / "e2_verify.json";
  RunOptions opts = in_memory();
  opts.seed = 777;
  const RunResult r = run_scenario_file(sc, "verify", opts);
  const ojson rep = ojson::parse(r.report_json);
  CHECK(rep.at("seed") == 777);
  const RunResult base = run_scenario_file(sc, "verify", in_memory());
  CHECK(ojson::parse(base.report_json).at("scenario_digest") ==
        rep.at("scenario_digest"));
  CHECK(base.report_json != r.report_json);
}

TEST_CASE("worker count never changes reported bytes") {
  for (const char* name : {"e2_certify.json", "e2_lyapunov.json"}) {
    const fs::path sc = scenario_dir() / name;
    const RunResult one = run_scenario_file(sc, "", in_memory(1));
    const RunResult three = run_scenario_file(sc, "", in_memory(3));
    CHECK(one.report_json == three.report_json);
    REQUIRE(one.side_files.size() == three.side_files.size());
    for (std::size_t i = 0; i < one.side_files.size(); ++i) {
      CHECK(one.side_files[i].first == three.side_files[i].first);
      CHECK(one.side_files[i].second == three.side_files[i].second);
    }
  }
}

TEST_CASE("certify scenarios exercise all three exit codes") {
  const RunResult pass =
      run_scenario_file(scenario_dir() / "e2_certify.json", "certify", in_memory());
  CHECK(pass.exit_code == 0);
  const ojson prep = ojson::parse(pass.report_json);
  CHECK(prep.at("results").at("certificate").at("N") == 1);
  REQUIRE(pass.side_files.size() == 1);
  CHECK(pass.side_files[0].first == "gaps.csv");
  CHECK(pass.side_files[0].second.rfind("n,max_gap\n", 0) == 0);

  const RunResult viol = run_scenario_file(
      scenario_dir() / "strong_diag_certify.json", "certify", in_memory());
  CHECK(viol.exit_code == 1);
  CHECK(viol.status == "violation");
  const ojson vrep = ojson::parse(viol.report_json);
  const ojson& witness = vrep.at("checks").at(0).at("witness");
  CHECK(witness.at("orbit_word") == "1");
  CHECK(witness.at("k") == 1);
  REQUIRE(viol.side_files.size() == 1);
  CHECK(viol.side_files[0].first == "premise_rates.csv");

  // the same cocycle under the direct search: no refutation, no certificate
  ojson direct = ojson::parse(
      std::ifstream(scenario_dir() / "strong_diag_certify.json"),
      nullptr, true);
  direct["params"] = ojson{{"cocycle", "SD"}, {"mode", "direct"}, {"n_max", 6}};
  const fs::path dpath = write_temp("sd_direct.json", direct.dump(2) + "\n");
  const RunResult und = run_scenario_file(dpath, "certify", in_memory());
  CHECK(und.exit_code == 2);
  CHECK(und.status == "undetermined");
  const ojson urep = ojson::parse(und.report_json);
  CHECK(urep.at("checks").at(0).at("witness").contains("gap"));
}

TEST_CASE("malformed scenarios are rejected as input errors") {
  CHECK_THROWS_AS(run_scenario_file(write_temp("bad.json", "not json at all"),
                                    "", in_memory()),
                  InvalidInput);
  CHECK_THROWS_AS(run_scenario_file(temp_dir() / "missing.json", "", in_memory()),
                  InvalidInput);
  CHECK_THROWS_AS(
      run_scenario_file(scenario_dir() / "e2_verify.json", "certify", in_memory()),
      InvalidInput);  // task mismatch

  ojson j = ojson::parse(std::ifstream(scenario_dir() / "e2_verify.json"));
  j["schema"] = "bogus-1";
  CHECK_THROWS_AS(run_scenario_file(write_temp("schema.json", j.dump()), "",
                                    in_memory()),
                  InvalidInput);
  j["schema"] = "cocyc-scenario-1";
  j["params"]["cocycle"] = "NOPE";
  CHECK_THROWS_AS(run_scenario_file(write_temp("refname.json", j.dump()), "",
                                    in_memory()),
                  InvalidInput);
  j["params"]["cocycle"] = "E2";
  j["task"] = "telepathy";
  CHECK_THROWS_AS(run_scenario_file(write_temp("task.json", j.dump()), "",
                                    in_memory()),
                  InvalidInput);

  RunOptions bad_workers = in_memory(0);
  CHECK_THROWS_AS(run_scenario_file(scenario_dir() / "e2_verify.json", "",
                                    bad_workers),
                  InvalidInput);
}

TEST_CASE("lyapunov scenario emits side tables with pinned headers") {
  const RunResult r = run_scenario_file(scenario_dir() / "e2_lyapunov.json",
                                        "lyapunov", in_memory());
  CHECK(r.exit_code == 0);
  REQUIRE(r.side_files.size() == 2);
  CHECK(r.side_files[0].first == "approximants.csv");
  CHECK(r.side_files[0].second.rfind("orbit_word,k,plus_value,minus_value\n", 0) == 0);
  CHECK(r.side_files[1].first == "trials.csv");
  CHECK(r.side_files[1].second.rfind("trial,plus,minus\n", 0) == 0);
  const ojson rep = ojson::parse(r.report_json);
  CHECK(rep.at("results").at("lambda_plus").get<double>() > 0.0);
}

TEST_CASE("cli maps scenario outcomes and usage errors to contract exits") {
  const std::string dir = (temp_dir() / "cli_out").string();
  const std::string base = " --out " + dir + " --scenario ";
  CHECK(run_cli("verify" + base + (scenario_dir() / "e2_verify.json").string()) == 0);
  CHECK(fs::exists(fs::path(dir) / "report.json"));
  CHECK(fs::exists(fs::path(dir) / "run_meta.json"));
  CHECK(run_cli("certify" + base +
                (scenario_dir() / "strong_diag_certify.json").string()) == 1);
  CHECK(fs::exists(fs::path(dir) / "premise_rates.csv"));
  // task mismatch, unreadable scenario, and usage errors are all exit 3
  CHECK(run_cli("lyapunov" + base + (scenario_dir() / "e2_verify.json").string()) == 3);
  CHECK(run_cli("verify" + base + (temp_dir() / "missing.json").string()) == 3);
  CHECK(run_cli("verify") == 3);
  CHECK(run_cli("no-such-command --scenario x.json") == 3);
  CHECK(run_cli("--help") == 0);

  // a CLI run and an in-process run agree byte for byte
  std::ifstream f(fs::path(dir) / "report.json", std::ios::binary);
  std::stringstream buf;
  buf << f.rdbuf();
  const RunResult mem = run_scenario_file(
      scenario_dir() / "strong_diag_certify.json", "certify", in_memory());
  CHECK(buf.str() == mem.report_json);
}
