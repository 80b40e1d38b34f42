#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "socopf/errors.hpp"
#include "socopf/network.hpp"

using namespace socopf;

namespace {

RawCase two_bus() { return parse_case(test::kTwoBusCase); }

ErrorCode build_error(const RawCase& raw) {
  try {
    build_network(raw);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

/// Bus chain 1-2-3 with optional closing branch 1-3.
RawCase three_bus(bool triangle) {
  RawCase raw = two_bus();
  BusRow b3 = raw.buses[1];
  b3.id = 3;
  raw.buses.push_back(b3);
  BranchRow br = raw.branches[0];
  br.from = 2;
  br.to = 3;
  raw.branches.push_back(br);
  if (triangle) {
    br.from = 1;
    br.to = 3;
    raw.branches.push_back(br);
  }
  return raw;
}

}  // namespace

TEST_CASE("two-bus per-unit branch with split charging") {
  const Network net = build_network(two_bus());
  REQUIRE(net.branches.size() == 1);
  const Branch& br = net.branches[0];
  CHECK(br.R == 0.01);
  CHECK(br.X == 0.1);
  CHECK(br.B_s == 0.01);
  CHECK(br.B_r == 0.01);
  CHECK_FALSE(br.rated());
  CHECK(net.buses[1].p_d == doctest::Approx(0.1));
  CHECK(net.buses[1].q_d == doctest::Approx(0.02));
  CHECK(net.reference_bus == 0);
  // Unlimited angles become symmetric and strictly inside (-pi/2, pi/2).
  CHECK(br.theta_max == doctest::Approx(M_PI / 2 - 1e-3));
  CHECK(br.theta_min == -br.theta_max);
  const Generator& g = net.generators[0];
  CHECK(g.p_max == doctest::Approx(2.0));
  // Cost on pu power: 0.1 (100 p)^2 + 20 (100 p) + 5.
  CHECK(g.alpha == doctest::Approx(1000.0));
  CHECK(g.beta == doctest::Approx(2000.0));
  CHECK(g.gamma == doctest::Approx(5.0));
}

TEST_CASE("rateA maps to a squared-current limit") {
  RawCase raw = two_bus();
  raw.branches[0].rate_a = 250.0;
  const Network net = build_network(raw);
  CHECK(net.branches[0].K_tilde == doctest::Approx(6.25));
}

TEST_CASE("case9 incidence") {
  const Network net = test::load_network("case9.m");
  CHECK(net.buses.size() == 9);
  CHECK(net.branches.size() == 9);
  CHECK(net.generators.size() == 3);
  for (int l = 0; l < 9; ++l) {
    int nnz = 0;
    double plus = 0.0, minus = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(net.A_plus, l); it; ++it) {
      ++nnz;
      if (it.value() == 1.0) {
        CHECK(it.row() == net.branches[l].from_bus);
        plus += 1.0;
      } else {
        CHECK(it.value() == -1.0);
        CHECK(it.row() == net.branches[l].to_bus);
        minus += 1.0;
      }
    }
    CHECK(nnz == 2);
    CHECK(plus == 1.0);
    CHECK(minus == 1.0);
    int nnz_minus = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(net.A_minus, l); it; ++it) {
      ++nnz_minus;
      CHECK(it.value() == -1.0);
      CHECK(it.row() == net.branches[l].to_bus);
    }
    CHECK(nnz_minus == 1);
  }
}

TEST_CASE("invalid networks") {
  RawCase raw = two_bus();
  raw.branches[0].x = 0.0;
  CHECK(build_error(raw) == ErrorCode::NonpositiveReactance);
  raw.branches[0].x = -0.1;
  CHECK(build_error(raw) == ErrorCode::NonpositiveReactance);

  raw = two_bus();
  raw.branches.clear();
  CHECK(build_error(raw) == ErrorCode::DisconnectedGraph);

  raw = two_bus();
  raw.buses.clear();
  raw.gens.clear();
  raw.gencosts.clear();
  raw.branches.clear();
  CHECK(build_error(raw) == ErrorCode::EmptyNetwork);
}

TEST_CASE("scale_loads") {
  const Network net = test::load_network("case9.m");
  double total = 0.0;
  for (const auto& b : net.buses) total += b.p_d;
  CHECK(total == doctest::Approx(3.15).epsilon(1e-12));

  const Network zero = scale_loads(net, 0.0);
  for (const auto& b : zero.buses) {
    CHECK(b.p_d == 0.0);
    CHECK(b.q_d == 0.0);
  }
  const Network a = scale_loads(net, 0.1);
  const Network b = scale_loads(net, 0.2);
  for (size_t n = 0; n < net.buses.size(); ++n) {
    CHECK(b.buses[n].p_d == 2.0 * a.buses[n].p_d);
    CHECK(b.buses[n].q_d == 2.0 * a.buses[n].q_d);
  }
  // Composition on nonnegative base loads.
  const Network ab = scale_loads(scale_loads(net, 0.5), 0.25);
  const Network direct = scale_loads(net, 0.125);
  for (size_t n = 0; n < net.buses.size(); ++n) {
    CHECK(ab.buses[n].p_d == doctest::Approx(direct.buses[n].p_d).epsilon(1e-15));
  }
  // Only the loads change.
  CHECK(a.branches.size() == net.branches.size());
  CHECK(a.generators[1].beta == net.generators[1].beta);
}

TEST_CASE("scale_loads uses absolute base loads") {
  RawCase raw = two_bus();
  raw.buses[1].pd = -10.0;
  raw.buses[1].qd = -3.0;
  const Network net = scale_loads(build_network(raw), 0.5);
  CHECK(net.buses[1].p_d == doctest::Approx(0.05));
  CHECK(net.buses[1].q_d == doctest::Approx(0.015));
}

TEST_CASE("spanning tree of a chain") {
  const Network net = build_network(three_bus(false));
  const auto tree = spanning_tree(net);
  REQUIRE(tree.size() == 2);
  CHECK(tree[0].branch == 0);
  CHECK(tree[0].parent == 0);
  CHECK(tree[0].child == 1);
  CHECK(tree[0].forward);
  CHECK(tree[1].branch == 1);
  CHECK(tree[1].forward);
  CHECK(chord_branches(net).empty());
  CHECK(independent_cycles(net) == 0);
}

TEST_CASE("spanning tree of a triangle") {
  const Network net = build_network(three_bus(true));
  const auto tree = spanning_tree(net);
  CHECK(tree.size() == 2);
  CHECK(chord_branches(net).size() == 1);
  CHECK(independent_cycles(net) == 1);
}

TEST_CASE("case9 spanning tree") {
  const Network net = test::load_network("case9.m");
  const auto tree = spanning_tree(net);
  CHECK(tree.size() == 8);
  CHECK(chord_branches(net).size() == 1);
  CHECK(independent_cycles(net) == 1);
  std::vector<int> seen(9, 0);
  seen[net.reference_bus] = 1;
  for (const auto& e : tree) {
    CHECK(seen[e.parent] == 1);  // BFS order: parent reached first
    CHECK(seen[e.child] == 0);
    seen[e.child] = 1;
    const auto& br = net.branches[e.branch];
    CHECK((e.forward ? br.from_bus : br.to_bus) == e.parent);
  }
  CHECK(std::accumulate(seen.begin(), seen.end(), 0) == 9);
}

TEST_CASE("bus incidence lists") {
  const Network net = build_network(three_bus(true));
  const auto inc = bus_incidence(net);
  CHECK(inc.sending[0] == std::vector<int>{0, 2});
  CHECK(inc.receiving[2] == std::vector<int>{1, 2});
  CHECK(inc.generators[0] == std::vector<int>{0});
  CHECK(inc.generators[1].empty());
}
