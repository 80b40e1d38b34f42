#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "socopf/conic_solver.hpp"
#include "socopf/formulation.hpp"
#include "socopf/network.hpp"

namespace socopf {

/// Variable map matching a solution vector of `size` entries: the plain
/// program, or the tightening program with load variables.
/// Throws DimensionMismatch for any other size.
VariableMap variable_map_for(const Network& net, Eigen::Index size);

struct RecoveryOptions {
  double tight_tol = 1e-6;  ///< on gap_qo, pu
  double feas_tol = 1e-6;   ///< on every o-ACOPF residual family
  double cycle_tol = 1e-6;  ///< rad
  double clip_tol = 1e-9;   ///< |theta_hat / (v_s v_r)| may exceed 1 by this much
};

enum class RecoveryStatus {
  GlobalOptimum,      ///< tight cones, feasible residuals, consistent cycles
  FeasibleOnly,       ///< feasible and consistent, but not certified optimal
  NotTight,           ///< some loss cone has gap_qo above tight_tol
  ResidualViolation,  ///< cones tight, yet another residual family fails
  CycleInconsistent,  ///< a fundamental cycle does not close
  ConditionViolated,  ///< |theta_hat| > v_s v_r, arcsin undefined
};

std::string_view to_string(RecoveryStatus status);

struct RecoveredAcSolution {
  AcPoint point;
  AcResiduals max_residuals;
  /// Per chord branch, wrapped angle sum around its fundamental cycle.
  std::vector<double> cycle_residuals;
  /// Generation cost at the recovered point.
  double objective = 0.0;
  bool is_feasible = false;
  bool is_global_certificate = false;
};

struct RecoveryOutcome {
  RecoveryStatus status = RecoveryStatus::ConditionViolated;
  /// Branches responsible for the status (empty for GlobalOptimum/FeasibleOnly).
  std::vector<int> violated_branches;
  std::string message;
};

struct Recovery {
  RecoveredAcSolution solution;
  RecoveryOutcome outcome;
};

/// margin_l = V_s V_r sin^2(theta_max) - theta_hat_l^2 per branch.
std::vector<double> check_recovery_condition(const Network& net, const SocSolution& sol);

/// v = sqrt(V), theta_l = arcsin(theta_hat / (v_s v_r)), nodal angles rebuilt
/// along the BFS spanning tree, then classified. Cycle mismatches are reported,
/// not repaired.
Recovery recover_ac_point(const Network& net, const SocSolution& sol,
                          const RecoveryOptions& options = {});

}  // namespace socopf
