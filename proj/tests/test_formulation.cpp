#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "socopf/conic_solver.hpp"
#include "socopf/errors.hpp"
#include "socopf/formulation.hpp"
#include "socopf/gap_analysis.hpp"
#include "socopf/recovery.hpp"

using namespace socopf;

namespace {

Network two_bus() { return build_network(parse_case(test::kTwoBusCase)); }

/// Two-bus case without charging and without load.
Network two_bus_unloaded() {
  RawCase raw = parse_case(test::kTwoBusCase);
  raw.branches[0].b = 0.0;
  raw.buses[1].pd = 0.0;
  raw.buses[1].qd = 0.0;
  return build_network(raw);
}

/// Chain 1-2-3 from the two-bus case, loads at buses 2 and 3.
Network three_bus_chain() {
  RawCase raw = parse_case(test::kTwoBusCase);
  BusRow b3 = raw.buses[1];
  b3.id = 3;
  b3.pd = 5;
  b3.qd = 1;
  raw.buses.push_back(b3);
  BranchRow br = raw.branches[0];
  br.from = 2;
  br.to = 3;
  br.r = 0.02;
  br.x = 0.08;
  br.b = 0.01;
  raw.branches.push_back(br);
  return build_network(raw);
}

/// Exact AC point from bus voltages: branch flows from the phasor relations,
/// one unbounded generator per bus absorbing the nodal mismatch.
AcPoint exact_point(Network& net, const Eigen::VectorXd& v, const Eigen::VectorXd& theta) {
  const auto N = static_cast<int>(net.buses.size());
  net.generators.clear();
  for (int n = 0; n < N; ++n) {
    Generator g;
    g.index = n;
    g.bus = n;
    g.p_min = -100;
    g.p_max = 100;
    g.q_min = -100;
    g.q_max = 100;
    net.generators.push_back(g);
  }
  AcPoint pt = AcPoint::zeros(net);
  pt.v = v;
  pt.V = v.cwiseProduct(v);
  pt.theta_n = theta;
  Eigen::VectorXd p_net = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd q_net = Eigen::VectorXd::Zero(N);
  for (const auto& b : net.buses) {
    p_net[b.index] = -b.p_d - b.G * pt.V[b.index];
    q_net[b.index] = -b.q_d + b.B * pt.V[b.index];
  }
  for (const auto& br : net.branches) {
    const int l = br.index;
    const int s = br.from_bus;
    const int r = br.to_bus;
    const double th = theta[s] - theta[r];
    const double a = pt.V[s] - v[s] * v[r] * std::cos(th);
    const double b = v[s] * v[r] * std::sin(th);
    const double z2 = br.R * br.R + br.X * br.X;
    pt.theta_l[l] = th;
    pt.p_s[l] = (br.R * a + br.X * b) / z2;
    pt.q_s[l] = (br.X * a - br.R * b) / z2;
    const double i2 = (pt.p_s[l] * pt.p_s[l] + pt.q_s[l] * pt.q_s[l]) / pt.V[s];
    pt.p_o[l] = br.R * i2;
    pt.q_o[l] = br.X * i2;
    p_net[s] -= pt.p_s[l];
    q_net[s] -= pt.q_s[l] - br.B_s * pt.V[s];
    p_net[r] -= -pt.p_s[l] + pt.p_o[l];
    q_net[r] -= -pt.q_s[l] + pt.q_o[l] - br.B_r * pt.V[r];
  }
  pt.p_g = -p_net;
  pt.q_g = -q_net;
  return pt;
}

}  // namespace

TEST_CASE("variable count follows the generator count") {
  Network net = two_bus();
  auto built = build_soc_acopf(net);
  CHECK(built.program.num_vars() == 11);
  CHECK(built.layout.map.dimension() == 11);

  Generator g2 = net.generators[0];
  g2.index = 1;
  g2.bus = 1;
  net.generators.push_back(g2);
  built = build_soc_acopf(net);
  CHECK(built.program.num_vars() == 13);
}

TEST_CASE("case9 block counts") {
  const Network net = test::load_network("case9.m");
  const auto built = build_soc_acopf(net);
  const auto& lay = built.layout;
  CHECK(lay.loss_cones.size() == 9);
  CHECK(lay.recovery_cones.size() == 9);
  CHECK(lay.loss_coupling_rows.size() == 9);
  CHECK(lay.linear_angle_rows.size() == 9);
  CHECK(lay.vdrop_rows.size() == 9);
  CHECK(lay.p_balance_rows.size() == 9);
  CHECK(built.program.rsoc_blocks.size() == 18);
  CHECK(built.program.le_rows.size() == 9);
  CHECK(built.program.warnings.empty());
  CHECK_NOTHROW(built.program.validate());

  FormulationOptions plain;
  plain.include_recovery_cone = false;
  plain.include_loss_ampacity = false;
  const auto bare = build_soc_acopf(net, plain);
  CHECK(bare.program.rsoc_blocks.size() == 9);
  CHECK(bare.program.le_rows.empty());
}

TEST_CASE("unrated branch has no ampacity row") {
  const auto built = build_soc_acopf(two_bus());
  CHECK(built.program.le_rows.empty());
  CHECK(built.layout.loss_ampacity_rows == std::vector<int>{-1});
  REQUIRE(built.program.warnings.size() == 1);
  CHECK(built.program.warnings[0].find("unrated") != std::string::npos);
}

TEST_CASE("asymmetric angle bounds are rejected with the recovery cone") {
  Network net = two_bus();
  net.branches[0].theta_min = -0.5;
  net.branches[0].theta_max = 0.6;
  try {
    build_soc_acopf(net);
    FAIL("expected AsymmetricAngleBounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AsymmetricAngleBounds);
  }
  FormulationOptions opts;
  opts.include_recovery_cone = false;
  CHECK_NOTHROW(build_soc_acopf(net, opts));
}

TEST_CASE("reactive loss bound") {
  Branch br;
  br.K_tilde = 1.0;
  br.B_s = 0.1;
  br.X = 0.1;
  CHECK(compute_k_ol(br, 1.0, 0.2) == doctest::Approx(0.103).epsilon(1e-12));

  br.B_s = 0.0;
  br.K_tilde = 2.5;
  br.X = 0.3;
  CHECK(compute_k_ol(br, 1.2, 0.7) == doctest::Approx(0.75).epsilon(1e-12));

  br.B_s = 0.1;
  br.K_tilde = 1.0;
  br.X = 1.0;
  CHECK(compute_k_ol(br, 1.0, 0.0) == doctest::Approx(0.99).epsilon(1e-12));

  br.B_r = 0.1;
  br.X = 0.1;
  CHECK(compute_k_ol_receiving(br, 1.0, 0.2) == doctest::Approx(0.103).epsilon(1e-12));
}

TEST_CASE("flat unloaded point has zero residuals") {
  const Network net = two_bus_unloaded();
  AcPoint pt = AcPoint::zeros(net);
  CHECK(eval_oacopf_residuals(net, pt).max() == 0.0);
  CHECK(eval_phasor_consistency(net, pt) == 0.0);

  pt.p_o[0] = 0.01;
  const auto res = eval_oacopf_residuals(net, pt);
  CHECK(res.loss_p == doctest::Approx(0.01));
  CHECK(res.loss_q == 0.0);

  AcPoint bad = AcPoint::zeros(net);
  bad.V.resize(3);
  CHECK_THROWS_AS(eval_oacopf_residuals(net, bad), Error);
}

TEST_CASE("phasor-built point satisfies the nonconvex model") {
  Network net = three_bus_chain();
  Eigen::VectorXd v(3);
  v << 1.03, 0.98, 0.95;
  Eigen::VectorXd th(3);
  th << 0.0, -0.04, -0.07;
  const AcPoint pt = exact_point(net, v, th);
  const auto res = eval_oacopf_residuals(net, pt);
  CHECK(res.vdrop <= 1e-12);
  CHECK(res.sine <= 1e-12);
  CHECK(eval_phasor_consistency(net, pt) <= 1e-12);
  CHECK(res.max() <= 1e-12);
}

TEST_CASE("radial AC points lie in the relaxation") {
  for (const auto& th1 : {0.0, 0.05, -0.08}) {
    Network net = three_bus_chain();
    Eigen::VectorXd v(3);
    v << 1.05, 0.97, 1.01;
    Eigen::VectorXd th(3);
    th << 0.0, th1, -0.03;
    const AcPoint pt = exact_point(net, v, th);
    REQUIRE(eval_oacopf_residuals(net, pt).max() <= 1e-12);
    const auto built = build_soc_acopf(net);
    const Eigen::VectorXd x = map_to_soc_point(net, built.layout.map, pt);
    CHECK(primal_violation(built.program, x) <= 1e-8);
  }
}

TEST_CASE("generator order does not change the optimum") {
  const Network net = test::load_network("case9.m");
  const auto base = solve(build_soc_acopf(net).program);
  REQUIRE(base.optimal());

  Network perm = net;
  std::reverse(perm.generators.begin(), perm.generators.end());
  for (std::size_t k = 0; k < perm.generators.size(); ++k) perm.generators[k].index = static_cast<int>(k);
  const auto other = solve(build_soc_acopf(perm).program);
  REQUIRE(other.optimal());
  CHECK(other.objective_value == doctest::Approx(base.objective_value).epsilon(1e-7));
}

TEST_CASE("tightening program layout") {
  const Network net = test::load_network("case9.m");
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 0.5);
  const auto built = build_tightening_program(net, p);
  const auto& map = built.layout.map;
  CHECK(map.has_load_variables);
  CHECK(built.program.num_vars() == 2 * 3 + 5 * 9 + 4 * 9);
  for (int k = 0; k < 3; ++k) {
    CHECK(built.program.lower[map.p_g(k)] == 0.5);
    CHECK(built.program.upper[map.p_g(k)] == 0.5);
  }
  for (const auto& b : net.buses) CHECK(built.program.lower[map.p_d(b.index)] == b.p_d);
  CHECK(built.program.linear[map.q_o(0)] == 1.0);
  CHECK(built.program.linear[map.p_g(0)] == 0.0);
  CHECK_THROWS_AS(build_tightening_program(net, Eigen::VectorXd::Zero(2)), Error);
}

TEST_CASE("tightened case9 recovers an AC-feasible point") {
  const Network net = scale_loads(test::load_network("case9.m"), 0.1);
  const auto sol = solve(build_soc_acopf(net).program);
  REQUIRE(sol.optimal());
  const auto tight = tighten_by_load_increase(net, sol);
  const auto rec = recover_ac_point(tight.network, tight.solution);
  const auto& r = rec.solution.max_residuals;
  CHECK(r.balance_p <= 1e-6);
  CHECK(r.balance_q <= 1e-6);
  CHECK(r.vdrop <= 1e-6);
  CHECK(r.sine <= 1e-6);
  CHECK(r.loss_p <= 1e-6);
  CHECK(r.loss_q <= 1e-6);
  CHECK(r.v_square <= 1e-6);
}
