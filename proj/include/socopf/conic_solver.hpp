#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "socopf/conic_program.hpp"

namespace socopf {

struct SolverSettings {
  double tol_gap = 1e-8;
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
  /// Infeasibility is declared when tau/kappa drops below this ratio.
  double tol_infeasible = 1e-8;
  int max_iterations = 200;
  double static_regularization = 1e-9;
  /// Upper bound on refinement steps per KKT solve; stops early once a step
  /// gains less than 5x.
  int refinement_steps = 10;
  int equilibration_iterations = 10;
  bool verbose = false;

  /// Throws InvalidArgument unless every tolerance is positive.
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalLimit, IterationLimit };

std::string_view to_string(SolveStatus status);

/// Residuals recomputed from (x, s, z) on the unscaled standard form.
///
/// primal_residual = max(|Ax + s - b|_inf, dist(s, K)) / max(1, |b|_inf)
/// dual_residual   = max(|Px + A'z + q|_inf, dist(z, K*)) / max(1, |q|_inf)
/// duality_gap     = |p - d| / max(1, min(|p|, |d|))
struct SolverCertificate {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  double objective_primal = 0.0;
  double objective_dual = 0.0;
};

struct SocSolution {
  SolveStatus status = SolveStatus::NumericalLimit;
  /// Primal point in program variables; for Unbounded the recession direction.
  Eigen::VectorXd x;
  double objective_value = 0.0;
  /// Multipliers of ConicProgram::eq_rows, in order.
  Eigen::VectorXd y_eq;
  /// Standard-form slack and dual vectors (row layout of lower_to_standard_form);
  /// for Infeasible, z is the Farkas ray.
  Eigen::VectorXd s;
  Eigen::VectorXd z;
  int iterations = 0;
  double solve_seconds = 0.0;
  SolverCertificate certificate;
  std::string message;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Result of solving a StandardForm directly.
struct StandardSolution {
  SolveStatus status = SolveStatus::NumericalLimit;
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  Eigen::VectorXd z;
  int iterations = 0;
  double solve_seconds = 0.0;
  SolverCertificate certificate;
  std::string message;
};

/// Interface for conic back ends; the embedded interior-point solver is the default.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual std::string name() const = 0;
  virtual StandardSolution solve(const StandardForm& form, const SolverSettings& settings) const = 0;

  /// Lowers the program, solves it and maps the result back to program variables.
  SocSolution solve(const ConicProgram& program, const SolverSettings& settings) const;
};

/// Primal-dual interior-point method on the homogeneous self-dual embedding
/// with Nesterov-Todd scaling and a quasi-definite sparse LDL' KKT solve.
class InteriorPointSolver final : public ConicSolver {
 public:
  std::string name() const override { return "socopf-ipm"; }
  using ConicSolver::solve;
  StandardSolution solve(const StandardForm& form, const SolverSettings& settings) const override;
};

/// Solves with the embedded interior-point solver.
SocSolution solve(const ConicProgram& program, const SolverSettings& settings = {});

SolverCertificate check_certificate(const StandardForm& form, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& s, const Eigen::VectorXd& z);

/// Throws DimensionMismatch when the solution vectors do not fit the program.
SolverCertificate check_certificate(const ConicProgram& program, const SocSolution& solution);

/// Largest violation of any program constraint (rows, bounds, cones) at x.
double primal_violation(const ConicProgram& program, const Eigen::VectorXd& x);

}  // namespace socopf
