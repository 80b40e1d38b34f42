#include "socopf/cli.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <iostream>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "socopf/conic_program.hpp"
#include "socopf/conic_solver.hpp"
#include "socopf/errors.hpp"
#include "socopf/formulation.hpp"
#include "socopf/gap_analysis.hpp"
#include "socopf/network.hpp"
#include "socopf/oracle.hpp"
#include "socopf/recovery.hpp"

namespace socopf {

using Json = nlohmann::ordered_json;

namespace {

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Sweep: return "sweep";
    case Command::Tighten: return "tighten";
    case Command::Validate: return "validate";
  }
  return "unknown";
}

bool is_input_error(ErrorCode code) {
  return code == ErrorCode::CaseFileNotFound || code == ErrorCode::MissingMatrix ||
         code == ErrorCode::MalformedRow || code == ErrorCode::UnsupportedCostModel;
}

std::string error_record(std::string_view code, std::string_view message) {
  Json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  return j.dump() + "\n";
}

/// NaN and infinities have no JSON spelling; they become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json gaps_json(const GapReport& report) {
  return Json::parse(write_report(report, ReportFormat::Json))["compute_gaps"];
}

Json run_json(const SweepItem& item) {
  Json j;
  j["load_factor"] = item.factor;
  if (!item.error.empty()) {
    j["status"] = "Error";
    j["error"] = item.error;
    return j;
  }
  const auto& sol = item.solution;
  j["status"] = to_string(sol.status);
  j["objective"] = number(sol.objective_value);
  j["iterations"] = sol.iterations;
  j["certificate"]["primal_residual"] = number(sol.certificate.primal_residual);
  j["certificate"]["dual_residual"] = number(sol.certificate.dual_residual);
  j["certificate"]["duality_gap"] = number(sol.certificate.duality_gap);
  if (!sol.optimal()) return j;
  j["gaps"] = gaps_json(item.report);
  if (item.recovery) {
    Json r;
    r["status"] = to_string(item.recovery->status);
    r["message"] = item.recovery->message;
    r["violated_branches"] = item.recovery->violated_branches;
    if (item.recovered) {
      r["objective"] = number(item.recovered->objective);
      r["max_residual"] = number(item.recovered->max_residuals.max());
      r["is_feasible"] = item.recovered->is_feasible;
      r["is_global_certificate"] = item.recovered->is_global_certificate;
    }
    j["recovery"] = std::move(r);
  }
  return j;
}

std::string csv_row(const SweepItem& item) {
  std::string row = format_double(item.factor) + ",";
  if (!item.error.empty()) return row + "Error,,,,\r\n";
  const auto& sol = item.solution;
  row += std::string(to_string(sol.status)) + "," + format_double(sol.objective_value) + ",";
  if (!sol.optimal()) return row + ",,\r\n";
  row += format_double(item.report.gap_po_max) + "," + format_double(item.report.gap_qo_max) + ",";
  row += item.recovery ? std::string(to_string(item.recovery->status)) : std::string();
  return row + "\r\n";
}

int sweep_exit_code(const SweepResult& sweep) {
  bool infeasible = false;
  for (const auto& item : sweep.items) {
    if (!item.error.empty()) return kExitFailure;
    const auto st = item.solution.status;
    if (st == SolveStatus::Infeasible || st == SolveStatus::Unbounded) {
      infeasible = true;
    } else if (st != SolveStatus::Optimal) {
      return kExitFailure;
    }
  }
  return infeasible ? kExitInfeasible : kExitOk;
}

struct Context {
  const RunConfig& config;
  FormulationOptions formulation;
  SolverSettings settings;
};

Json header(const Context& ctx) {
  Json j;
  j["command"] = command_name(ctx.config.command);
  j["case"] = ctx.config.case_path.filename().string();
  j["options"]["include_recovery_cone"] = ctx.formulation.include_recovery_cone;
  j["options"]["include_loss_ampacity"] = ctx.formulation.include_loss_ampacity;
  j["options"]["tolerance"] = ctx.settings.tol_gap;
  return j;
}

RunResult finish(const RunConfig& config, RunResult r) {
  if (!config.out.empty() && !r.report.empty()) write_file_atomic(config.out, r.report);
  return r;
}

RunResult run_validate(const Context& ctx) {
  const RunConfig& config = ctx.config;
  struct Topology {
    const char* name;
    TinyNetworkOptions options;
  };
  const Topology topologies[] = {
      {"2-bus", {2, false, false}},
      {"3-bus path", {3, false, false}},
      {"3-bus path, 2 generators", {3, false, true}},
      {"3-bus triangle, 2 generators", {3, true, true}},
  };
  Json samples = Json::array();
  std::string csv = "topology,seed,soc_objective,oracle_objective,pass\r\n";
  bool all = true;
  for (const auto& t : topologies) {
    for (int seed = 1; seed <= config.validate_samples; ++seed) {
      const Network net = random_tiny_network(static_cast<std::uint64_t>(seed), t.options);
      const auto sol = solve(build_soc_acopf(net, ctx.formulation).program, ctx.settings);
      Json s;
      s["topology"] = t.name;
      s["seed"] = seed;
      s["soc_status"] = to_string(sol.status);
      bool pass = sol.optimal();
      double oracle_obj = std::numeric_limits<double>::quiet_NaN();
      try {
        oracle_obj = brute_force_acopf(net).objective;
        // The SOC value is a lower bound up to grid resolution.
        pass = pass && sol.objective_value <= oracle_obj + 5e-3 &&
               oracle_obj >= sol.objective_value - 1e-4;
      } catch (const Error& e) {
        s["oracle_error"] = e.what();
        pass = false;
      }
      s["soc_objective"] = number(sol.objective_value);
      s["oracle_objective"] = number(oracle_obj);
      s["pass"] = pass;
      all = all && pass;
      csv += csv_field(t.name) + "," + std::to_string(seed) + "," + format_double(sol.objective_value) +
             "," + format_double(oracle_obj) + "," + (pass ? "true" : "false") + "\r\n";
      samples.push_back(std::move(s));
    }
  }
  RunResult r;
  r.exit_code = all ? kExitOk : kExitFailure;
  if (config.format == ReportFormat::Csv) {
    r.report = csv;
  } else {
    Json j = header(ctx);
    j.erase("case");
    j["samples"] = std::move(samples);
    j["passed"] = all;
    r.report = j.dump(2) + "\n";
  }
  if (!all) r.error = error_record("ValidationFailed", "oracle sandwich violated on at least one sample");
  return finish(config, std::move(r));
}

RunResult run_case(const Context& ctx) {
  const RunConfig& config = ctx.config;
  const Network net = build_network(read_case_file(config.case_path));
  for (const auto& w : net.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  std::vector<double> factors = config.load_factors;
  if (config.command != Command::Sweep) factors.resize(1);

  if (!config.dump_program.empty()) {
    const auto built = build_soc_acopf(scale_loads(net, factors.front()), ctx.formulation);
    write_file_atomic(config.dump_program, dump_standard_form(lower_to_standard_form(built.program)));
  }

  SweepOptions opts;
  opts.formulation = ctx.formulation;
  opts.settings = ctx.settings;
  const SweepResult sweep = load_sweep(net, factors, opts);

  RunResult r;
  r.exit_code = sweep_exit_code(sweep);
  Json j = header(ctx);
  Json runs = Json::array();
  std::string csv = "load_factor,status,objective,gap_po_max,gap_qo_max,recovery";
  if (config.command == Command::Tighten) csv += ",tightened_objective,tightened_gap_po_max,tightened_gap_qo_max";
  csv += "\r\n";

  for (const auto& item : sweep.items) {
    Json rj = run_json(item);
    std::string row = csv_row(item);
    if (config.command == Command::Tighten && item.ok()) {
      const Network scaled = scale_loads(net, item.factor);
      try {
        const auto t = tighten_by_load_increase(scaled, item.solution, ctx.formulation, ctx.settings);
        Json tj;
        tj["objective"] = number(t.solution.objective_value);
        tj["gaps"] = gaps_json(t.report);
        rj["tightening"] = std::move(tj);
        row.resize(row.size() - 2);
        row += "," + format_double(t.solution.objective_value) + "," + format_double(t.report.gap_po_max) +
               "," + format_double(t.report.gap_qo_max) + "\r\n";
      } catch (const Error& e) {
        rj["tightening"]["error"] = std::string(to_string(e.code())) + ": " + e.what();
        r.exit_code = kExitFailure;
        r.error = error_record(to_string(e.code()), e.what());
      }
    }
    runs.push_back(std::move(rj));
    csv += row;
  }
  j["runs"] = std::move(runs);
  if (config.command == Command::Sweep) j["monotone"] = sweep.monotone;

  r.report = config.format == ReportFormat::Json ? j.dump(2) + "\n" : csv;
  if (r.error.empty() && r.exit_code != kExitOk) {
    for (const auto& item : sweep.items) {
      if (!item.error.empty()) {
        r.error = error_record("SolveFailed", item.error);
        break;
      }
      if (!item.solution.optimal()) {
        r.error = error_record(to_string(item.solution.status),
                               "load factor " + format_double(item.factor) + ": " + item.solution.message);
        break;
      }
    }
  }
  return finish(config, std::move(r));
}

}  // namespace

void RunConfig::validate() const {
  if (command != Command::Validate) {
    if (load_factors.empty()) throw Error(ErrorCode::InvalidArgument, "at least one load factor is required");
    for (double f : load_factors) {
      if (!(f >= 0.0) || !std::isfinite(f)) {
        throw Error(ErrorCode::InvalidArgument, "load factors must be finite and nonnegative");
      }
    }
  }
  if (tolerance && !(*tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (validate_samples < 1) throw Error(ErrorCode::InvalidArgument, "validate needs at least one sample");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

RunResult run(const RunConfig& config) {
  try {
    config.validate();
    Context ctx{config, {}, {}};
    ctx.formulation.include_recovery_cone = config.include_recovery_cone;
    ctx.formulation.include_loss_ampacity = config.include_loss_ampacity;
    if (config.tolerance) {
      ctx.settings.tol_gap = ctx.settings.tol_primal = ctx.settings.tol_dual = *config.tolerance;
    }
    ctx.settings.validate();
    return config.command == Command::Validate ? run_validate(ctx) : run_case(ctx);
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = is_input_error(e.code()) ? kExitInputError : kExitFailure;
    r.error = error_record(to_string(e.code()), e.what());
    return r;
  } catch (const std::exception& e) {
    RunResult r;
    r.exit_code = kExitFailure;
    r.error = error_record("InternalError", e.what());
    return r;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Second-order-cone relaxation of branch-flow ACOPF on MATPOWER cases"};
  app.require_subcommand(1);
  RunConfig config;
  double load = 1.0;
  std::vector<double> loads;
  std::string format = "json";
  bool no_recovery_cone = false;
  bool no_loss_ampacity = false;

  auto common = [&](CLI::App* sub, bool needs_case) {
    if (needs_case) sub->add_option("case", config.case_path, "MATPOWER case file")->required();
    sub->add_option("--tol", config.tolerance, "solver tolerance (primal, dual, gap)");
    sub->add_option("--out", config.out, "write the report here instead of stdout");
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--no-recovery-cone", no_recovery_cone, "drop the recovery cone");
    sub->add_flag("--no-loss-ampacity", no_loss_ampacity, "drop the loss-ampacity bound");
  };
  auto* solve_cmd = app.add_subcommand("solve", "solve one load factor");
  auto* sweep_cmd = app.add_subcommand("sweep", "solve a list of load factors");
  auto* tighten_cmd = app.add_subcommand("tighten", "solve, then tighten by load increase");
  auto* validate_cmd = app.add_subcommand("validate", "oracle sandwich self-test on tiny networks");
  for (auto* sub : {solve_cmd, tighten_cmd}) {
    common(sub, true);
    sub->add_option("--load", load, "load factor")->check(CLI::NonNegativeNumber);
    sub->add_option("--dump-program", config.dump_program, "write the standard-form program");
  }
  common(sweep_cmd, true);
  sweep_cmd->add_option("--loads", loads, "comma-separated load factors")->delimiter(',')->required();
  sweep_cmd->add_option("--dump-program", config.dump_program, "write the program of the first factor");
  common(validate_cmd, false);
  validate_cmd->add_option("--samples", config.validate_samples, "networks per topology")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFailure;
  }

  if (solve_cmd->parsed()) config.command = Command::Solve;
  if (sweep_cmd->parsed()) config.command = Command::Sweep;
  if (tighten_cmd->parsed()) config.command = Command::Tighten;
  if (validate_cmd->parsed()) config.command = Command::Validate;
  config.load_factors = config.command == Command::Sweep ? loads : std::vector<double>{load};
  config.format = format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
  config.include_recovery_cone = !no_recovery_cone;
  config.include_loss_ampacity = !no_loss_ampacity;

  const RunResult r = run(config);
  if (config.out.empty() && !r.report.empty()) std::cout << r.report;
  if (!r.error.empty()) std::cerr << r.error;
  return r.exit_code;
}

}  // namespace socopf
