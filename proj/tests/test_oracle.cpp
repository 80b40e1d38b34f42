#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "socopf/conic_solver.hpp"
#include "socopf/errors.hpp"
#include "socopf/oracle.hpp"

using namespace socopf;

namespace {

/// Two-bus case without charging, R 0.01, X 0.1, load 0.1 + j0.02 pu.
RawCase two_bus_raw() {
  RawCase raw = parse_case(test::kTwoBusCase);
  raw.branches[0].b = 0.0;
  return raw;
}

ErrorCode oracle_error(const Network& net, const GridSearchSpec& spec = {}) {
  try {
    brute_force_acopf(net, spec);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("unloaded zero-cost network") {
  RawCase raw = two_bus_raw();
  raw.buses[1].pd = 0.0;
  raw.buses[1].qd = 0.0;
  raw.gencosts[0].coefficients = {0.0, 0.0, 0.0};
  const auto res = brute_force_acopf(build_network(raw));
  CHECK(res.objective == 0.0);
  CHECK(res.residuals.max() <= 1e-9);
  CHECK(res.feasible > 0);
  CHECK(res.evaluated >= res.feasible);
}

TEST_CASE("two-bus sandwich") {
  const Network net = build_network(two_bus_raw());
  const auto sol = solve(build_soc_acopf(net).program);
  REQUIRE(sol.optimal());
  const auto res = brute_force_acopf(net);
  CHECK(res.objective >= sol.objective_value - 1e-4);
  CHECK(res.objective <= sol.objective_value + 5e-3);
  CHECK(res.objective == doctest::Approx(generation_cost(net, res.point.p_g)));
  CHECK(res.residuals.max() <= 1e-6);
  CHECK(eval_phasor_consistency(net, res.point) <= 1e-9);
}

TEST_CASE("oversized load on a weak line has no feasible point") {
  RawCase raw = two_bus_raw();
  raw.buses[1].pd = 1000.0;
  raw.branches[0].rate_a = 10.0;
  const Network net = build_network(raw);
  REQUIRE(net.branches[0].K_tilde == doctest::Approx(0.01));
  CHECK(oracle_error(net) == ErrorCode::NoFeasiblePoint);
}

TEST_CASE("grid and size checks") {
  CHECK(oracle_error(test::load_network("case9.m")) == ErrorCode::InvalidArgument);

  const Network net = build_network(two_bus_raw());
  GridSearchSpec spec;
  spec.v_steps = 2;
  CHECK(oracle_error(net, spec) == ErrorCode::InvalidArgument);
  spec = {};
  spec.p_steps = 1;
  CHECK(oracle_error(net, spec) == ErrorCode::InvalidArgument);
  spec = {};
  spec.tolerance = 0.0;
  CHECK(oracle_error(net, spec) == ErrorCode::InvalidArgument);
  spec = {};
  spec.v_range = {{0.95, 1.05}};
  CHECK(oracle_error(net, spec) == ErrorCode::InvalidArgument);
  spec.v_range = {{0.95, 1.05}, {0.8, 1.0}};
  CHECK(oracle_error(net, spec) == ErrorCode::InvalidArgument);
  spec.v_range = {{0.95, 1.05}, {0.95, 1.05}};
  CHECK_NOTHROW(spec.validate(net));

  CHECK_THROWS_AS(random_tiny_network(1, {4, false, false}), Error);
}

TEST_CASE("random tiny networks") {
  for (int buses : {2, 3}) {
    const auto net = random_tiny_network(7, {buses, buses == 3, true});
    CHECK(static_cast<int>(net.buses.size()) == buses);
    CHECK(net.generators.size() == 2);
    CHECK(net.reference_bus == 0);
    for (const auto& br : net.branches) {
      CHECK(br.R >= 0.001);
      CHECK(br.R <= 0.1);
      CHECK(br.X >= 0.01);
      CHECK(br.X <= 0.3);
    }
    for (const auto& g : net.generators) CHECK(g.alpha > 0.0);
  }
  CHECK(random_tiny_network(3, {3, true, false}).branches.size() == 3);
  CHECK(random_tiny_network(3, {3, false, false}).branches.size() == 2);
}

TEST_CASE("SOC objective is sandwiched on random networks") {
  const TinyNetworkOptions kinds[] = {{2, false, false}, {3, false, true}, {3, true, false}};
  for (std::uint64_t seed = 500; seed < 508; ++seed) {
    for (const auto& kind : kinds) {
      CAPTURE(seed);
      CAPTURE(kind.buses);
      CAPTURE(kind.meshed);
      const Network net = random_tiny_network(seed, kind);
      const auto sol = solve(build_soc_acopf(net).program);
      REQUIRE(sol.optimal());
      const auto res = brute_force_acopf(net);
      CHECK(sol.objective_value <= res.objective + 5e-3);
      // On a mesh the linearized angle rows also bind theta_l, so the
      // relaxation can sit slightly above AC points whose cycles close in theta.
      if (!kind.meshed) CHECK(res.objective >= sol.objective_value - 1e-4);
      CHECK(res.residuals.max() <= 1e-4);

      if (!kind.meshed) {
        // A radial incumbent maps into the relaxation.
        const auto built = build_soc_acopf(net);
        const Eigen::VectorXd x = map_to_soc_point(net, built.layout.map, res.point);
        CHECK(primal_violation(built.program, x) <= 1e-4);
      }
    }
  }
}

TEST_CASE("oracle is deterministic") {
  const Network net = random_tiny_network(42, {3, false, true});
  const auto a = brute_force_acopf(net);
  const auto b = brute_force_acopf(net);
  CHECK(a.objective == b.objective);
  CHECK(a.point.p_g == b.point.p_g);
  CHECK(a.point.v == b.point.v);
  CHECK(a.evaluated == b.evaluated);
}

TEST_CASE("random SOCPs come with a strictly feasible point") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto rs = random_socp(seed, 3 + static_cast<int>(seed));
    CHECK(rs.form.n == rs.x0.size());
    CHECK_NOTHROW(parse_standard_form(dump_standard_form(rs.form)));
    const auto ref = barrier_reference_solve(rs.form);
    CHECK(ref.converged);
    const auto again = barrier_reference_solve(dump_standard_form(rs.form));
    CHECK(again.objective == doctest::Approx(ref.objective).epsilon(1e-9));
  }
  CHECK_THROWS_AS(random_socp(1, 0), Error);
}
