#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "socopf/conic_program.hpp"
#include "socopf/formulation.hpp"
#include "socopf/network.hpp"

namespace socopf {

/// Grid for brute_force_acopf. The voltage magnitude of every generator bus
/// (and the reference bus) is enumerated, together with the total active
/// output of each non-reference generator bus. Angles, and the voltages of
/// buses without generators, follow from Newton's method so that the active
/// balance of every non-reference bus and the reactive balance of buses
/// without generators hold exactly; the reference bus absorbs the remainder.
struct GridSearchSpec {
  int v_steps = 11;
  int p_steps = 41;
  /// Per bus; empty means [v_min, v_max].
  std::vector<std::pair<double, double>> v_range;
  int refinement_rounds = 10;
  /// Inequality slack at the first pitch; shrinks with the pitch on refinement.
  double tolerance = 1e-4;

  /// Throws InvalidArgument unless steps >= 3 and v ranges lie within the bus bounds.
  void validate(const Network& net) const;
};

struct OracleResult {
  AcPoint point;
  double objective = 0.0;
  AcResiduals residuals;
  long evaluated = 0;
  long feasible = 0;
};

/// Best AC-feasible point found on the grid plus local refinement.
/// Throws InvalidArgument for more than 3 buses and NoFeasiblePoint if
/// nothing on the grid is feasible within tolerance.
OracleResult brute_force_acopf(const Network& net, const GridSearchSpec& spec = {});

struct TinyNetworkOptions {
  int buses = 2;       ///< 2 or 3
  bool meshed = false; ///< 3 buses: triangle instead of a path
  bool second_generator = false;
};

/// Random network in the regime R in [0.001, 0.1], X in [0.01, 0.3],
/// loads p_d in [0.05, 0.3], q_d in [0, 0.1] pu, strictly convex generator
/// costs. Bus 0 is the reference.
Network random_tiny_network(std::uint64_t seed, const TinyNetworkOptions& options);

/// A standard-form SOCP with a known strictly feasible point and a
/// dual-feasible certificate, so the optimum is finite.
struct RandomSocp {
  StandardForm form;
  Eigen::VectorXd x0;
};

RandomSocp random_socp(std::uint64_t seed, int n);

struct BarrierResult {
  bool converged = false;
  double objective = 0.0;
  Eigen::VectorXd x;
  int newton_steps = 0;
};

/// Dense primal log-barrier method with a phase-I search for a strictly
/// feasible start. Independent of the interior-point solver; meant for
/// programs with a few dozen variables.
BarrierResult barrier_reference_solve(const StandardForm& form);

/// Reads a dump_standard_form text and solves it with the barrier method.
BarrierResult barrier_reference_solve(std::string_view dump);

}  // namespace socopf
