#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "socopf/cli.hpp"
#include "socopf/conic_program.hpp"

using namespace socopf;
using Json = nlohmann::json;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("socopf_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig config_for(const std::string& case_name, Command command, std::vector<double> factors) {
  RunConfig c;
  c.case_path = test::data_path(case_name);
  c.command = command;
  c.load_factors = std::move(factors);
  return c;
}

int call_main(std::vector<std::string> args) {
  args.insert(args.begin(), "socopf");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("solve case9 at 10% load") {
  const auto r = run(config_for("case9.m", Command::Solve, {0.1}));
  REQUIRE(r.exit_code == kExitOk);
  CHECK(r.error.empty());
  const Json j = Json::parse(r.report);
  CHECK(j["command"] == "solve");
  CHECK(j["case"] == "case9.m");
  REQUIRE(j["runs"].size() == 1);
  const auto& run0 = j["runs"][0];
  CHECK(run0["status"] == "Optimal");
  CHECK(std::abs(run0["objective"].get<double>() - 1170.74) / 1170.74 <= 5e-3);
  CHECK(run0.contains("gaps"));
  CHECK(run0.contains("recovery"));
}

TEST_CASE("sweep case4") {
  const auto r = run(config_for("case4.m", Command::Sweep, {0.1, 0.2, 0.3, 0.4}));
  REQUIRE(r.exit_code == kExitOk);
  const Json j = Json::parse(r.report);
  REQUIRE(j["runs"].size() == 4);
  CHECK(j["monotone"] == true);
  double prev = -1.0;
  for (const auto& run : j["runs"]) {
    const double obj = run["objective"].get<double>();
    CHECK(obj >= prev - 1e-7);
    prev = obj;
  }
  CHECK(std::abs(j["runs"][0]["objective"].get<double>() - 2.40107) / 2.40107 <= 5e-3);
}

TEST_CASE("missing case file") {
  const auto r = run(config_for("no_such_case.m", Command::Solve, {0.1}));
  CHECK(r.exit_code == kExitInputError);
  CHECK(r.report.empty());
  const Json e = Json::parse(r.error);
  CHECK(e["error"]["code"] == "CaseFileNotFound");
  CHECK(e["error"]["message"].get<std::string>().find("case file not found") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
  const auto cfg = config_for("case9.m", Command::Sweep, {0.1, 0.2});
  const auto a = run(cfg);
  const auto b = run(cfg);
  REQUIRE(a.exit_code == kExitOk);
  CHECK(a.report == b.report);
}

TEST_CASE("config validation") {
  auto cfg = config_for("case9.m", Command::Sweep, {});
  CHECK(run(cfg).exit_code == kExitFailure);
  cfg.load_factors = {-0.1};
  CHECK(run(cfg).exit_code == kExitFailure);
  cfg.load_factors = {0.1};
  cfg.tolerance = 0.0;
  const auto r = run(cfg);
  CHECK(r.exit_code == kExitFailure);
  CHECK(Json::parse(r.error)["error"]["code"] == "InvalidArgument");
}

TEST_CASE("csv report and file output") {
  const auto dir = scratch_dir();
  auto cfg = config_for("case9.m", Command::Sweep, {0.1, 0.2});
  cfg.format = ReportFormat::Csv;
  cfg.out = dir / "report.csv";
  cfg.dump_program = dir / "program.txt";
  const auto r = run(cfg);
  REQUIRE(r.exit_code == kExitOk);
  CHECK(read_file(cfg.out) == r.report);
  CHECK(r.report.rfind("load_factor,status,objective,gap_po_max,gap_qo_max,recovery\r\n", 0) == 0);
  CHECK(std::count(r.report.begin(), r.report.end(), '\n') == 3);

  // Only the final files remain; the temporaries were renamed away.
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
    ++files;
  }
  CHECK(files == 2);

  const auto form = parse_standard_form(read_file(cfg.dump_program));
  CHECK(form.rsoc.size() == 18);
  std::filesystem::remove_all(dir);
}

TEST_CASE("tighten command") {
  const auto r = run(config_for("case9.m", Command::Tighten, {0.1}));
  REQUIRE(r.exit_code == kExitOk);
  const Json j = Json::parse(r.report);
  const auto& t = j["runs"][0]["tightening"];
  CHECK(t["gaps"]["gap_qo_max"].get<double>() <= 1e-6);
}

TEST_CASE("infeasible case exits with 2") {
  RawCase raw = parse_case(test::kTwoBusCase);
  raw.buses[1].pd = 1000.0;
  raw.branches[0].rate_a = 10.0;
  const auto dir = scratch_dir();
  const auto path = dir / "overloaded.m";
  write_file_atomic(path, write_case(raw, "overloaded"));
  RunConfig cfg;
  cfg.case_path = path;
  cfg.load_factors = {1.0};
  const auto r = run(cfg);
  CHECK(r.exit_code == kExitInfeasible);
  CHECK(Json::parse(r.error)["error"]["code"] == "Infeasible");
  std::filesystem::remove_all(dir);
}

TEST_CASE("command line front end") {
  const auto dir = scratch_dir();
  const auto out = dir / "out.json";
  CHECK(call_main({"solve", test::data_path("case9.m").string(), "--load", "0.1", "--out", out.string()}) ==
        kExitOk);
  const Json j = Json::parse(read_file(out));
  CHECK(std::abs(j["runs"][0]["objective"].get<double>() - 1170.74) / 1170.74 <= 5e-3);

  CHECK(call_main({"solve", (dir / "missing.m").string()}) == kExitInputError);
  CHECK(call_main({"frobnicate"}) == kExitFailure);
  CHECK(call_main({"solve", test::data_path("case9.m").string(), "--load", "-1"}) == kExitFailure);
  CHECK(call_main({"validate", "--samples", "1", "--out", out.string()}) == kExitOk);
  CHECK(Json::parse(read_file(out))["passed"] == true);
  std::filesystem::remove_all(dir);
}
