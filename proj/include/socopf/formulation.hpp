#pragma once

#include <vector>

#include <Eigen/Dense>

#include "socopf/conic_program.hpp"
#include "socopf/network.hpp"

namespace socopf {

/// Offsets of each variable family in the program's variable vector.
///
/// Layout: p_g[G] q_g[G] p_s[L] q_s[L] p_o[L] q_o[L] theta_l[L] V[N] theta_n[N],
/// followed by p_d[N] q_d[N] in tightening programs.
struct VariableMap {
  int num_gens = 0;
  int num_branches = 0;
  int num_buses = 0;
  bool has_load_variables = false;

  int p_g(int k) const { return k; }
  int q_g(int k) const { return num_gens + k; }
  int p_s(int l) const { return 2 * num_gens + l; }
  int q_s(int l) const { return 2 * num_gens + num_branches + l; }
  int p_o(int l) const { return 2 * num_gens + 2 * num_branches + l; }
  int q_o(int l) const { return 2 * num_gens + 3 * num_branches + l; }
  int theta_l(int l) const { return 2 * num_gens + 4 * num_branches + l; }
  int V(int n) const { return 2 * num_gens + 5 * num_branches + n; }
  int theta_n(int n) const { return 2 * num_gens + 5 * num_branches + num_buses + n; }
  int p_d(int n) const { return 2 * num_gens + 5 * num_branches + 2 * num_buses + n; }
  int q_d(int n) const { return 2 * num_gens + 5 * num_branches + 3 * num_buses + n; }

  /// 2|G| + 5|L| + 2|N| (+ 2|N| with load variables).
  int dimension() const {
    return 2 * num_gens + 5 * num_branches + (has_load_variables ? 4 : 2) * num_buses;
  }
};

struct FormulationOptions {
  bool include_recovery_cone = true;
  bool include_loss_ampacity = true;
  /// Adds the receiving-end loss cone q_o V_r >= (p_r^2 + q_r^2) X with
  /// p_r = p_s - p_o, q_r = q_s - q_o.
  bool include_receiving_loss_cone = false;
};

/// Named row groups of a built program, for tests and diagnostics.
struct ProgramLayout {
  VariableMap map;
  std::vector<int> p_balance_rows;
  std::vector<int> q_balance_rows;
  std::vector<int> vdrop_rows;
  std::vector<int> angle_definition_rows;
  std::vector<int> loss_coupling_rows;
  std::vector<int> linear_angle_rows;
  /// Per branch: index into le_rows, -1 when K_tilde is infinite or the bound is off.
  std::vector<int> loss_ampacity_rows;
  /// Per branch: index into rsoc_blocks.
  std::vector<int> loss_cones;
  std::vector<int> recovery_cones;
  std::vector<int> receiving_loss_cones;
};

struct BuiltProgram {
  ConicProgram program;
  ProgramLayout layout;
};

/// Assembles the SOC relaxation (loss cone, loss coupling, linearized angle,
/// voltage drop, power balance) with optional recovery cone and loss ampacity.
///
/// Throws AsymmetricAngleBounds if the recovery cone is requested and some
/// branch has theta_min != -theta_max.
BuiltProgram build_soc_acopf(const Network& net, const FormulationOptions& options = {});

/// Tightening variant: generator active power fixed to `p_fixed`, loads become
/// variables bounded below by the network loads, objective sum(q_o).
BuiltProgram build_tightening_program(const Network& net, const Eigen::VectorXd& p_fixed,
                                      const FormulationOptions& options = {});

/// Reactive-loss upper bound (K_tilde - V_s B_s^2 + 2 q_s B_s) X.
double compute_k_ol(const Branch& branch, double V_s, double q_s);

/// Same bound at the receiving end; q_r = q_o - q_s is the reactive flow entering the branch there.
double compute_k_ol_receiving(const Branch& branch, double V_r, double q_r);

/// A point of the original nonconvex model.
struct AcPoint {
  Eigen::VectorXd p_g;
  Eigen::VectorXd q_g;
  Eigen::VectorXd p_s;
  Eigen::VectorXd q_s;
  Eigen::VectorXd p_o;
  Eigen::VectorXd q_o;
  Eigen::VectorXd V;
  Eigen::VectorXd v;
  Eigen::VectorXd theta_l;
  Eigen::VectorXd theta_n;

  static AcPoint zeros(const Network& net);
};

/// Per-family maximum absolute residuals of the nonconvex model.
struct AcResiduals {
  double balance_p = 0.0;
  double balance_q = 0.0;
  double vdrop = 0.0;
  double sine = 0.0;
  double v_square = 0.0;
  double angle_definition = 0.0;
  double loss_p = 0.0;
  double loss_q = 0.0;
  /// max(0, measurable current^2 - K_tilde) over both ends.
  double ampacity = 0.0;
  double bounds = 0.0;
  /// Largest |sum of branch angles around an independent cycle|, wrapped to (-pi, pi].
  double cycle = 0.0;

  /// Maximum over every family.
  double max() const;
};

/// Throws DimensionMismatch when the point does not fit the network.
AcResiduals eval_oacopf_residuals(const Network& net, const AcPoint& point);

/// max over branches of |V_s - v_s v_r cos(theta_l) - p_s R - q_s X|.
double eval_phasor_consistency(const Network& net, const AcPoint& point);

/// Objective sum(alpha p^2 + beta p + gamma) at the generator outputs.
double generation_cost(const Network& net, const Eigen::VectorXd& p_g);

/// Maps an AC point into program variables with theta_l := v_s v_r sin(theta_l)
/// and node angles integrated from those along the spanning tree.
Eigen::VectorXd map_to_soc_point(const Network& net, const VariableMap& map, const AcPoint& point);

/// Squared measurable current at the sending and receiving end of branch l.
double measurable_current_sq_sending(const Branch& br, double p_s, double q_s, double V_s);
double measurable_current_sq_receiving(const Branch& br, double p_s, double q_s, double p_o,
                                       double q_o, double V_r);

}  // namespace socopf
