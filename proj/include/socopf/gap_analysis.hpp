#pragma once

#include <optional>
#include <string>
#include <vector>

#include "socopf/conic_solver.hpp"
#include "socopf/formulation.hpp"
#include "socopf/network.hpp"
#include "socopf/recovery.hpp"
#include "socopf/report.hpp"

namespace socopf {

/// Sending-end gaps p_o - (p_s^2+q_s^2)/V_s R and q_o - (p_s^2+q_s^2)/V_s X,
/// with maxima and argmax. objective is taken from the solution.
GapReport compute_gaps(const Network& net, const SocSolution& sol, double load_factor = 1.0);

struct TighteningResult {
  /// Input network with loads raised to the tightened values.
  Network network;
  /// p_g fixed at the input optimum, remaining variables from the re-solve,
  /// truncated to the plain program layout; objective_value is the generation cost.
  /// s, z and y_eq belong to the tightening program.
  SocSolution solution;
  GapReport report;
};

/// Fixes p_g at the optimum, turns loads into variables bounded below by their
/// current values and minimizes total q_o. An already tight solution comes back
/// unchanged. Throws TightenInfeasible if the re-solve is not Optimal.
TighteningResult tighten_by_load_increase(const Network& net, const SocSolution& sol,
                                          const FormulationOptions& formulation = {},
                                          const SolverSettings& settings = {},
                                          double tight_tol = 1e-6);

struct SweepOptions {
  FormulationOptions formulation;
  SolverSettings settings;
  RecoveryOptions recovery;
  /// 0: min(hardware threads, SOCOPF_THREADS if set, number of factors).
  int threads = 0;
  /// Slack for the nondecreasing-objective check.
  double monotone_slack = 1e-7;
};

struct SweepItem {
  double factor = 0.0;
  SocSolution solution;
  GapReport report;
  std::optional<RecoveryOutcome> recovery;
  std::optional<RecoveredAcSolution> recovered;
  /// Non-empty when this factor threw; the sweep carries on.
  std::string error;

  bool ok() const { return error.empty() && solution.optimal(); }
};

struct SweepResult {
  std::vector<SweepItem> items;
  /// Objectives of consecutive optimal items are nondecreasing within monotone_slack.
  bool monotone = true;
};

/// One independent build/solve/recover/gap run per factor. Factors must be
/// ascending and nonnegative (InvalidArgument otherwise).
SweepResult load_sweep(const Network& net, const std::vector<double>& factors,
                       const SweepOptions& options = {});

/// Thread count used by load_sweep for `jobs` items.
int sweep_threads(int requested, int jobs);

}  // namespace socopf
