#include <fstream>
#include <regex>

#include "doctest.h"
#include "helpers.hpp"
#include "socopf/errors.hpp"
#include "socopf/matpower_io.hpp"

using namespace socopf;

namespace {

std::string without(std::string text, const std::string& matrix) {
  const auto start = text.find("mpc." + matrix + " = [");
  REQUIRE(start != std::string::npos);
  const auto end = text.find("];", start);
  return text.erase(start, end + 2 - start);
}

ErrorCode code_of(std::string_view text) {
  try {
    parse_case(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

const char* kCases[] = {"case4.m",   "case9.m",   "case14.m",       "case30.m",     "case57.m",
                        "case118.m", "case300.m", "case1354pegase.m", "case2383wp.m", "case3120sp.m"};

}  // namespace

TEST_CASE("minimal two-bus case parses") {
  const RawCase raw = parse_case(test::kTwoBusCase);
  CHECK(raw.base_mva == 100.0);
  CHECK(raw.buses.size() == 2);
  CHECK(raw.gens.size() == 1);
  CHECK(raw.branches.size() == 1);
  REQUIRE(raw.gencosts.size() == 1);
  CHECK(raw.gencosts[0].coefficients == std::vector<double>{0.1, 20.0, 5.0});
  CHECK(raw.branches[0].x == 0.1);
  CHECK(raw.buses[1].pd == 10.0);
  CHECK(raw.warnings.empty());
}

TEST_CASE("case9 row counts") {
  const RawCase raw = read_case_file(test::data_path("case9.m"));
  CHECK(raw.buses.size() == 9);
  CHECK(raw.branches.size() == 9);
  CHECK(raw.gens.size() == 3);
  CHECK(raw.base_mva == 100.0);
  // Trailing columns beyond the documented ones are ignored.
  CHECK(raw.gens[0].pmax == 250.0);
  CHECK(raw.branches[2].b == 0.358);
}

TEST_CASE("missing matrices are reported") {
  const std::string text = test::kTwoBusCase;
  CHECK(code_of(without(text, "gencost")) == ErrorCode::MissingMatrix);
  CHECK(code_of(without(text, "bus")) == ErrorCode::MissingMatrix);
  CHECK(code_of(std::regex_replace(text, std::regex("mpc.baseMVA = 100;"), "")) ==
        ErrorCode::MissingMatrix);
}

TEST_CASE("malformed rows are rejected") {
  const std::string text = test::kTwoBusCase;
  CHECK(code_of(std::regex_replace(text, std::regex("0.01 0.1 0.02"), "0.01 abc 0.02")) ==
        ErrorCode::MalformedRow);
  // Too few columns in a branch row.
  CHECK(code_of(std::regex_replace(text, std::regex("1 2 0.01 0.1 0.02 0 0 0 0 0 1 -360 360;"),
                                   "1 2 0.01 0.1;")) == ErrorCode::MalformedRow);
  // Branch to an unknown bus.
  CHECK(code_of(std::regex_replace(text, std::regex("1 2 0.01"), "1 7 0.01")) == ErrorCode::MalformedRow);
}

TEST_CASE("piecewise-linear costs are unsupported") {
  const std::string text =
      std::regex_replace(test::kTwoBusCase, std::regex("2 0 0 3 0.1 20 5;"), "1 0 0 2 0 0 100 2000;");
  CHECK(code_of(text) == ErrorCode::UnsupportedCostModel);
}

TEST_CASE("out-of-service rows are dropped with a warning") {
  std::string text = test::kTwoBusCase;
  text = std::regex_replace(text, std::regex("mpc.gen = \\[\n"),
                            "mpc.gen = [\n  2 0 0 10 -10 1 100 0 50 0;\n");
  text = std::regex_replace(text, std::regex("mpc.gencost = \\[\n"), "mpc.gencost = [\n  2 0 0 3 1 1 1;\n");
  text = std::regex_replace(text, std::regex("mpc.branch = \\[\n"),
                            "mpc.branch = [\n  1 2 0.02 0.2 0 0 0 0 0 0 0 -360 360;\n");
  const RawCase raw = parse_case(text);
  CHECK(raw.gens.size() == 1);
  CHECK(raw.gencosts.size() == 1);
  CHECK(raw.gencosts[0].coefficients == std::vector<double>{0.1, 20.0, 5.0});
  CHECK(raw.branches.size() == 1);
  CHECK(raw.branches[0].x == 0.1);
  CHECK(raw.warnings.size() == 2);
}

TEST_CASE("case files that cannot be opened") {
  try {
    read_case_file("no/such/case.m");
    FAIL("expected CaseFileNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CaseFileNotFound);
    CHECK(std::string(e.what()).find("case file not found") != std::string::npos);
  }
}

TEST_CASE("write_case is idempotent at the RawCase level") {
  for (const char* name : kCases) {
    CAPTURE(name);
    const RawCase first = read_case_file(test::data_path(name));
    const RawCase second = parse_case(write_case(first));
    CHECK(first.same_data(second));
    CHECK(second.same_data(parse_case(write_case(second))));
  }
  const RawCase two = parse_case(test::kTwoBusCase);
  CHECK(two.same_data(parse_case(write_case(two, "renamed"))));
}

TEST_CASE("csv report with no branches is header only") {
  GapReport report;
  CHECK(write_report(report, ReportFormat::Csv) == "branch,gap_po,gap_qo\r\n");
}

TEST_CASE("csv report row carries the gap value") {
  GapReport report;
  report.per_branch.push_back({0, 0.01, 0.02});
  const std::string csv = write_report(report, ReportFormat::Csv);
  CHECK(csv == "branch,gap_po,gap_qo\r\n0,0.01,0.02\r\n");
}

TEST_CASE("json report round trips bit-exactly") {
  GapReport report;
  report.per_branch = {{0, 0.1 + 0.2, 1.0 / 3.0}, {1, 5e-324, -0.0}, {2, 1.7976931348623157e308, 1e-17}};
  report.gap_po_max = 1.7976931348623157e308;
  report.gap_qo_max = 1.0 / 3.0;
  report.argmax_branch_po = 2;
  report.argmax_branch_qo = 0;
  report.objective = 1170.7428273456;
  report.load_factor = 0.1;
  report.tightened = true;
  report.load_increase = {{4, 0.0123456789012345, 2.0 / 7.0}};
  const std::string json = write_report(report, ReportFormat::Json);
  const GapReport back = parse_report_json(json);
  CHECK(back == report);
  CHECK(write_report(back, ReportFormat::Json) == json);
}

TEST_CASE("csv_field quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.01) == "0.01");
  CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
  for (double v : {1.0 / 3.0, 1170.742827, 5e-324, -2.5e-10}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}
