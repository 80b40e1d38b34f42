#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "socopf/report.hpp"

namespace socopf {

/// One row of `mpc.bus`, MATPOWER units (MW, MVAr, degrees, pu).
struct BusRow {
  int id = 0;
  int type = 1;
  double pd = 0.0;
  double qd = 0.0;
  double gs = 0.0;
  double bs = 0.0;
  int area = 1;
  double vm = 1.0;
  double va = 0.0;
  double base_kv = 0.0;
  int zone = 1;
  double vmax = 1.1;
  double vmin = 0.9;

  bool operator==(const BusRow&) const = default;
};

/// One row of `mpc.gen`.
struct GenRow {
  int bus = 0;
  double pg = 0.0;
  double qg = 0.0;
  double qmax = 0.0;
  double qmin = 0.0;
  double vg = 1.0;
  double mbase = 100.0;
  int status = 1;
  double pmax = 0.0;
  double pmin = 0.0;

  bool operator==(const GenRow&) const = default;
};

/// One row of `mpc.branch`. A ratio of 0 means "no transformer".
struct BranchRow {
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double b = 0.0;
  double rate_a = 0.0;
  double rate_b = 0.0;
  double rate_c = 0.0;
  double ratio = 0.0;
  double angle = 0.0;
  int status = 1;
  double angmin = -360.0;
  double angmax = 360.0;

  bool operator==(const BranchRow&) const = default;
};

enum class CostModel { PiecewiseLinear = 1, Polynomial = 2 };

/// One row of `mpc.gencost`; polynomial coefficients are stored highest order first.
struct GencostRow {
  CostModel model = CostModel::Polynomial;
  double startup = 0.0;
  double shutdown = 0.0;
  std::vector<double> coefficients;

  bool operator==(const GencostRow&) const = default;
};

/// Raw MATPOWER case data with out-of-service rows already removed.
struct RawCase {
  double base_mva = 100.0;
  std::vector<BusRow> buses;
  std::vector<GenRow> gens;
  std::vector<BranchRow> branches;
  std::vector<GencostRow> gencosts;
  /// One entry per row dropped or reinterpreted while parsing.
  std::vector<std::string> warnings;

  bool same_data(const RawCase& other) const;
};

/// Parses the text of a MATPOWER version 2 case function.
///
/// Throws Error with MissingMatrix, MalformedRow or UnsupportedCostModel.
/// Generators and branches with status 0 are dropped (with their gencost rows)
/// and reported in `RawCase::warnings`.
RawCase parse_case(std::string_view text);

/// Reads and parses a case file; throws CaseFileNotFound if it cannot be opened.
RawCase read_case_file(const std::filesystem::path& path);

/// Serializes a RawCase as a MATPOWER case function that parse_case accepts.
std::string write_case(const RawCase& raw_case, std::string_view function_name = "mpc_case");

enum class ReportFormat { Json, Csv };

std::string write_report(const GapReport& report, ReportFormat format);

/// Inverse of write_report(report, ReportFormat::Json).
GapReport parse_report_json(std::string_view text);

/// Quotes a CSV field per RFC 4180 when it contains a comma, quote or line break.
std::string csv_field(std::string_view field);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace socopf
