#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "socopf/errors.hpp"
#include "socopf/gap_analysis.hpp"
#include "socopf/oracle.hpp"
#include "socopf/recovery.hpp"

using namespace socopf;

namespace {

Network two_bus() { return build_network(parse_case(test::kTwoBusCase)); }

Network two_bus_unloaded() {
  RawCase raw = parse_case(test::kTwoBusCase);
  raw.branches[0].b = 0.0;
  raw.buses[1].pd = 0.0;
  raw.buses[1].qd = 0.0;
  return build_network(raw);
}

/// Hand-set SOC point with flat voltages, no flow and the given theta_hat.
SocSolution flat_solution(const Network& net, const std::vector<double>& theta_hat) {
  const auto built = build_soc_acopf(net);
  const auto& map = built.layout.map;
  SocSolution sol;
  sol.status = SolveStatus::Optimal;
  sol.x = Eigen::VectorXd::Zero(map.dimension());
  for (const auto& b : net.buses) sol.x[map.V(b.index)] = 1.0;
  for (std::size_t l = 0; l < theta_hat.size(); ++l) sol.x[map.theta_l(static_cast<int>(l))] = theta_hat[l];
  return sol;
}

}  // namespace

TEST_CASE("recovery condition margins") {
  Network net = two_bus();
  net.branches[0].theta_max = std::numbers::pi / 2;
  net.branches[0].theta_min = -std::numbers::pi / 2;
  auto m = check_recovery_condition(net, flat_solution(net, {0.5}));
  REQUIRE(m.size() == 1);
  CHECK(m[0] == doctest::Approx(0.75).epsilon(1e-15));

  net = two_bus();
  m = check_recovery_condition(net, flat_solution(net, {std::sin(net.branches[0].theta_max)}));
  CHECK(std::abs(m[0]) <= 1e-15);

  const Network case9 = scale_loads(test::load_network("case9.m"), 0.1);
  const auto sol = solve(build_soc_acopf(case9).program);
  REQUIRE(sol.optimal());
  for (double margin : check_recovery_condition(case9, sol)) CHECK(margin >= -1e-9);
}

TEST_CASE("flat SOC solution recovers the flat AC point") {
  const Network net = two_bus_unloaded();
  const auto sol = solve(build_soc_acopf(net).program);
  REQUIRE(sol.optimal());
  const auto rec = recover_ac_point(net, sol);
  CHECK(rec.outcome.status == RecoveryStatus::GlobalOptimum);
  CHECK(rec.outcome.violated_branches.empty());
  CHECK(rec.solution.is_global_certificate);
  CHECK(rec.solution.objective == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(std::abs(rec.solution.point.theta_l[0]) <= 1e-8);
  CHECK(std::abs(rec.solution.point.p_s[0]) <= 1e-8);
}

TEST_CASE("arcsin map keeps the sign") {
  const Network net = two_bus();
  auto rec = recover_ac_point(net, flat_solution(net, {0.5}));
  CHECK(rec.solution.point.theta_l[0] == doctest::Approx(0.523599).epsilon(1e-6));
  CHECK(rec.solution.point.theta_n[1] == doctest::Approx(-0.523599).epsilon(1e-6));
  rec = recover_ac_point(net, flat_solution(net, {-0.5}));
  CHECK(rec.solution.point.theta_l[0] == doctest::Approx(-std::asin(0.5)).epsilon(1e-15));
}

TEST_CASE("theta_hat beyond v_s v_r violates the condition") {
  const Network net = two_bus();
  const auto rec = recover_ac_point(net, flat_solution(net, {1.5}));
  CHECK(rec.outcome.status == RecoveryStatus::ConditionViolated);
  CHECK(rec.outcome.violated_branches == std::vector<int>{0});
  CHECK_FALSE(rec.solution.is_feasible);

  // Within clip_tol the ratio is clipped rather than rejected.
  const auto edge = recover_ac_point(net, flat_solution(net, {1.0 + 1e-12}));
  CHECK(edge.outcome.status != RecoveryStatus::ConditionViolated);
  CHECK(edge.solution.point.theta_l[0] == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("open cycle is reported, not repaired") {
  RawCase raw = parse_case(test::kTwoBusCase);
  BusRow b3 = raw.buses[1];
  b3.id = 3;
  raw.buses.push_back(b3);
  BranchRow br = raw.branches[0];
  br.from = 2;
  br.to = 3;
  raw.branches.push_back(br);
  br.from = 1;
  br.to = 3;
  raw.branches.push_back(br);
  const Network net = build_network(raw);

  // The cycle closes in the recovered angles, so theta_hat carries their sines.
  const double s1 = std::sin(0.1);
  const auto rec = recover_ac_point(net, flat_solution(net, {s1, s1, s1}));
  CHECK(rec.outcome.status == RecoveryStatus::CycleInconsistent);
  CHECK(rec.outcome.violated_branches == chord_branches(net));
  REQUIRE(rec.solution.cycle_residuals.size() == 1);
  CHECK(std::abs(rec.solution.cycle_residuals[0]) == doctest::Approx(0.1).epsilon(1e-12));

  const auto closed = recover_ac_point(net, flat_solution(net, {s1, s1, std::sin(0.2)}));
  CHECK(closed.outcome.status != RecoveryStatus::CycleInconsistent);
  CHECK(std::abs(closed.solution.cycle_residuals[0]) <= 1e-9);
}

TEST_CASE("solution size selects the variable map") {
  const Network net = test::load_network("case9.m");
  CHECK_FALSE(variable_map_for(net, 2 * 3 + 5 * 9 + 2 * 9).has_load_variables);
  CHECK(variable_map_for(net, 2 * 3 + 5 * 9 + 4 * 9).has_load_variables);
  try {
    variable_map_for(net, 10);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("tight two-bus recovery matches the brute-force optimum") {
  const Network net = two_bus();
  const auto built = build_soc_acopf(net);
  const auto sol = solve(built.program);
  REQUIRE(sol.optimal());
  const auto rec = recover_ac_point(net, sol);
  REQUIRE(rec.outcome.status == RecoveryStatus::GlobalOptimum);
  const auto& a = rec.solution.point;

  const auto oracle = brute_force_acopf(net);
  const auto& b = oracle.point;
  const double tol = 1e-5;
  CHECK((a.p_g - b.p_g).lpNorm<Eigen::Infinity>() <= tol);
  CHECK((a.q_g - b.q_g).lpNorm<Eigen::Infinity>() <= tol);
  CHECK((a.p_s - b.p_s).lpNorm<Eigen::Infinity>() <= tol);
  CHECK((a.q_s - b.q_s).lpNorm<Eigen::Infinity>() <= tol);
  CHECK((a.p_o - b.p_o).lpNorm<Eigen::Infinity>() <= tol);
  CHECK((a.q_o - b.q_o).lpNorm<Eigen::Infinity>() <= tol);
  CHECK((a.v - b.v).lpNorm<Eigen::Infinity>() <= tol);
  CHECK((a.theta_l - b.theta_l).lpNorm<Eigen::Infinity>() <= tol);
  CHECK(rec.solution.objective == doctest::Approx(oracle.objective).epsilon(1e-5));

  // Mapping the recovered point back reproduces the SOC solution.
  const Eigen::VectorXd x = map_to_soc_point(net, built.layout.map, a);
  CHECK((x - sol.x).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("tightened solutions recover with the load variables dropped") {
  const Network net = scale_loads(test::load_network("case4.m"), 0.1);
  const auto sol = solve(build_soc_acopf(net).program);
  REQUIRE(sol.optimal());
  const auto tight = tighten_by_load_increase(net, sol);
  const auto rec = recover_ac_point(tight.network, tight.solution);
  CHECK(rec.outcome.status != RecoveryStatus::ConditionViolated);
  CHECK(rec.outcome.status != RecoveryStatus::NotTight);
}
