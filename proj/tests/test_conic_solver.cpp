#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "socopf/cones.hpp"
#include "socopf/conic_solver.hpp"
#include "socopf/errors.hpp"
#include "socopf/formulation.hpp"
#include "socopf/oracle.hpp"

using namespace socopf;

namespace {

/// min x s.t. x >= 1
ConicProgram box_lp() {
  ConicProgram prog;
  prog.add_variable("x", 1.0, kInf);
  prog.linear[0] = 1.0;
  return prog;
}

/// min q_o s.t. q_o V >= (p^2 + q^2) X with p = 3, q = 4, V = 1, X = 1 fixed.
ConicProgram cone_example() {
  ConicProgram prog;
  const int qo = prog.add_variable("q_o", -kInf, kInf);
  const int V = prog.add_variable("V", 1.0, 1.0);
  const int p = prog.add_variable("p", 3.0, 3.0);
  const int q = prog.add_variable("q", 4.0, 4.0);
  prog.linear[qo] = 1.0;
  prog.rsoc_blocks.push_back(
      {AffineExpr::var(qo, 0.5), AffineExpr::var(V), {AffineExpr::var(p), AffineExpr::var(q)}, "loss"});
  return prog;
}

double dense_objective(const StandardForm& f, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd P = Eigen::MatrixXd(f.P).selfadjointView<Eigen::Upper>();
  return 0.5 * x.dot(P * x) + f.q.dot(x) + f.c0;
}

}  // namespace

TEST_CASE("box LP") {
  const auto sol = solve(box_lp());
  REQUIRE(sol.optimal());
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("rotated cone is tight at the optimum") {
  const auto sol = solve(cone_example());
  REQUIRE(sol.optimal());
  CHECK(sol.x[0] == doctest::Approx(25.0).epsilon(1e-8));
  CHECK(sol.x[0] * sol.x[1] - 25.0 == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("random SOCPs agree with the barrier reference") {
  for (std::uint64_t seed = 101; seed <= 150; ++seed) {
    CAPTURE(seed);
    const auto rs = random_socp(seed, 2 + static_cast<int>(seed % 19));
    const auto ref = barrier_reference_solve(rs.form);
    const auto sol = InteriorPointSolver().solve(rs.form, SolverSettings{});
    REQUIRE(ref.converged);
    REQUIRE(sol.status == SolveStatus::Optimal);
    const double obj = dense_objective(rs.form, sol.x);
    CHECK(std::abs(obj - ref.objective) / std::max(1.0, std::abs(ref.objective)) <= 1e-6);
  }
}

TEST_CASE("hand-built certificate of the box LP") {
  RowMap rows;
  const StandardForm f = lower_to_standard_form(box_lp(), &rows);
  REQUIRE(f.m == 1);
  Eigen::VectorXd x(1), s(1), z(1);
  x << 1.0;
  s = f.b - f.A * x;
  z << 1.0;
  auto cert = check_certificate(f, x, s, z);
  CHECK(cert.primal_residual == 0.0);
  CHECK(cert.dual_residual == 0.0);
  CHECK(cert.duality_gap == 0.0);

  x[0] += 1e-3;
  cert = check_certificate(f, x, s, z);
  CHECK(cert.primal_residual >= 1e-3 * (1 - 1e-12));
}

TEST_CASE("case9 certificate") {
  const auto built = build_soc_acopf(scale_loads(test::load_network("case9.m"), 0.1));
  const auto sol = solve(built.program);
  REQUIRE(sol.optimal());
  const auto cert = check_certificate(built.program, sol);
  CHECK(cert.primal_residual <= 1e-8);
  CHECK(cert.dual_residual <= 1e-8);
  CHECK(cert.duality_gap <= 1e-8);
  // Weak duality up to the gap tolerance.
  CHECK(cert.objective_primal >= cert.objective_dual - 1e-8 * std::abs(cert.objective_primal));
  CHECK(primal_violation(built.program, sol.x) <= 1e-7);

  const StandardForm f = lower_to_standard_form(built.program);
  const ConeProduct cones(f);
  CHECK(cones.violation(sol.s) <= 1e-9);
  CHECK(cones.violation(sol.z, true) <= 1e-9);
  CHECK(sol.y_eq.size() == static_cast<Eigen::Index>(built.program.eq_rows.size()));

  SocSolution bad = sol;
  bad.x.resize(3);
  CHECK_THROWS_AS(check_certificate(built.program, bad), Error);
}

TEST_CASE("objective scaling leaves the minimizer unchanged") {
  const auto built = build_soc_acopf(scale_loads(test::load_network("case9.m"), 0.2));
  const auto a = solve(built.program);
  ConicProgram scaled = built.program;
  for (auto& w : scaled.quad) w *= 10.0;
  for (auto& c : scaled.linear) c *= 10.0;
  scaled.constant *= 10.0;
  const auto b = solve(scaled);
  REQUIRE(a.optimal());
  REQUIRE(b.optimal());
  CHECK(b.objective_value == doctest::Approx(10.0 * a.objective_value).epsilon(1e-7));
  const int G = built.layout.map.num_gens;
  CHECK((b.x.head(G) - a.x.head(G)).lpNorm<Eigen::Infinity>() <= 1e-5);
}

TEST_CASE("infeasible and unbounded programs") {
  ConicProgram infeasible;
  infeasible.add_variable("x", 2.0, kInf);
  infeasible.linear[0] = 1.0;
  infeasible.le_rows.push_back({{{0, 1.0}}, 1.0, "cap"});
  CHECK(solve(infeasible).status == SolveStatus::Infeasible);

  ConicProgram unbounded;
  unbounded.add_variable("x", 0.0, kInf);
  unbounded.linear[0] = -1.0;
  const auto sol = solve(unbounded);
  CHECK(sol.status == SolveStatus::Unbounded);
  REQUIRE(sol.x.size() == 1);
  CHECK(sol.x[0] > 0.0);
}

TEST_CASE("standard-form dump round trip") {
  const auto built = build_soc_acopf(test::load_network("case9.m"));
  const StandardForm f = lower_to_standard_form(built.program);
  const StandardForm g = parse_standard_form(dump_standard_form(f));
  CHECK(g.n == f.n);
  CHECK(g.m == f.m);
  CHECK(g.zero == f.zero);
  CHECK(g.nonneg == f.nonneg);
  CHECK(g.soc == f.soc);
  CHECK(g.rsoc == f.rsoc);
  CHECK(g.c0 == f.c0);
  CHECK(g.q == f.q);
  CHECK(g.b == f.b);
  CHECK(Eigen::MatrixXd(g.A) == Eigen::MatrixXd(f.A));
  CHECK(Eigen::MatrixXd(g.P) == Eigen::MatrixXd(f.P));
  CHECK(dump_standard_form(g) == dump_standard_form(f));
}

TEST_CASE("solves are deterministic") {
  const auto built = build_soc_acopf(scale_loads(test::load_network("case9.m"), 0.3));
  const auto a = solve(built.program);
  const auto b = solve(built.program);
  CHECK(a.iterations == b.iterations);
  CHECK(a.x == b.x);
  CHECK(a.z == b.z);
}

TEST_CASE("settings validation") {
  SolverSettings s;
  CHECK_NOTHROW(s.validate());
  s.tol_gap = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.tol_primal = -1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.tol_infeasible = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
}
