#include "socopf/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "socopf/errors.hpp"

namespace socopf {

namespace {

std::string indexed(const char* name, int i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

VariableMap make_map(const Network& net, bool loads) {
  VariableMap map;
  map.num_gens = static_cast<int>(net.generators.size());
  map.num_branches = static_cast<int>(net.branches.size());
  map.num_buses = static_cast<int>(net.buses.size());
  map.has_load_variables = loads;
  return map;
}

/// Declares every variable in VariableMap order with its box.
void declare_variables(const Network& net, const VariableMap& map, ConicProgram& prog,
                       const Eigen::VectorXd* p_fixed) {
  for (const auto& g : net.generators) {
    if (p_fixed) {
      const double p = (*p_fixed)[g.index];
      prog.add_variable(indexed("p_g", g.index), p, p);
    } else {
      prog.add_variable(indexed("p_g", g.index), g.p_min, g.p_max);
    }
  }
  for (const auto& g : net.generators) prog.add_variable(indexed("q_g", g.index), g.q_min, g.q_max);
  const char* free_names[] = {"p_s", "q_s", "p_o", "q_o", "theta_l"};
  for (const char* name : free_names) {
    for (const auto& br : net.branches) prog.add_variable(indexed(name, br.index), -kInf, kInf);
  }
  for (const auto& b : net.buses) {
    prog.add_variable(indexed("V", b.index), b.v_min * b.v_min, b.v_max * b.v_max);
  }
  for (const auto& b : net.buses) prog.add_variable(indexed("theta_n", b.index), b.theta_min, b.theta_max);
  if (map.has_load_variables) {
    for (const auto& b : net.buses) prog.add_variable(indexed("p_d", b.index), b.p_d, kInf);
    for (const auto& b : net.buses) prog.add_variable(indexed("q_d", b.index), b.q_d, kInf);
  }
}

BuiltProgram build(const Network& net, const FormulationOptions& options,
                   const Eigen::VectorXd* p_fixed) {
  if (net.buses.empty()) throw Error(ErrorCode::EmptyNetwork, "network has no buses");
  if (options.include_recovery_cone) {
    for (const auto& br : net.branches) {
      if (br.theta_min != -br.theta_max) {
        throw Error(ErrorCode::AsymmetricAngleBounds,
                    "branch " + std::to_string(br.index) + " has theta_min != -theta_max");
      }
    }
  }
  for (const auto& br : net.branches) {
    if (!(br.X > 0.0)) {
      throw Error(ErrorCode::NonpositiveReactance, "branch " + std::to_string(br.index) + " has X <= 0");
    }
  }

  BuiltProgram out;
  auto& prog = out.program;
  auto& lay = out.layout;
  const bool loads = p_fixed != nullptr;
  lay.map = make_map(net, loads);
  const auto& map = lay.map;
  declare_variables(net, map, prog, p_fixed);

  if (loads) {
    for (const auto& br : net.branches) prog.linear[map.q_o(br.index)] = 1.0;
  } else {
    for (const auto& g : net.generators) {
      prog.quad[map.p_g(g.index)] = g.alpha;
      prog.linear[map.p_g(g.index)] = g.beta;
      prog.constant += g.gamma;
    }
  }

  const BusIncidence inc = bus_incidence(net);

  // Nodal balance. Branch end shunts B_s, B_r act like bus susceptance.
  for (const auto& bus : net.buses) {
    const int n = bus.index;
    LinearRow p_row;
    LinearRow q_row;
    p_row.name = indexed("p_balance", n);
    q_row.name = indexed("q_balance", n);
    for (int k : inc.generators[n]) {
      p_row.terms.push_back({map.p_g(k), 1.0});
      q_row.terms.push_back({map.q_g(k), 1.0});
    }
    double b_total = bus.B;
    for (int l : inc.sending[n]) {
      p_row.terms.push_back({map.p_s(l), -1.0});
      q_row.terms.push_back({map.q_s(l), -1.0});
      b_total += net.branches[l].B_s;
    }
    for (int l : inc.receiving[n]) {
      p_row.terms.push_back({map.p_s(l), 1.0});
      p_row.terms.push_back({map.p_o(l), -1.0});
      q_row.terms.push_back({map.q_s(l), 1.0});
      q_row.terms.push_back({map.q_o(l), -1.0});
      b_total += net.branches[l].B_r;
    }
    if (bus.G != 0.0) p_row.terms.push_back({map.V(n), -bus.G});
    if (b_total != 0.0) q_row.terms.push_back({map.V(n), b_total});
    if (loads) {
      p_row.terms.push_back({map.p_d(n), -1.0});
      q_row.terms.push_back({map.q_d(n), -1.0});
    } else {
      p_row.rhs = bus.p_d;
      q_row.rhs = bus.q_d;
    }
    lay.p_balance_rows.push_back(static_cast<int>(prog.eq_rows.size()));
    prog.eq_rows.push_back(std::move(p_row));
    lay.q_balance_rows.push_back(static_cast<int>(prog.eq_rows.size()));
    prog.eq_rows.push_back(std::move(q_row));
  }

  for (const auto& br : net.branches) {
    const int l = br.index;
    const double R = br.R;
    const double X = br.X;
    const int s = br.from_bus;
    const int r = br.to_bus;

    lay.vdrop_rows.push_back(static_cast<int>(prog.eq_rows.size()));
    prog.eq_rows.push_back({{{map.V(s), 1.0},
                             {map.V(r), -1.0},
                             {map.p_s(l), -2.0 * R},
                             {map.q_s(l), -2.0 * X},
                             {map.p_o(l), R},
                             {map.q_o(l), X}},
                            0.0,
                            indexed("vdrop", l)});
    lay.angle_definition_rows.push_back(static_cast<int>(prog.eq_rows.size()));
    prog.eq_rows.push_back({{{map.theta_l(l), 1.0}, {map.theta_n(s), -1.0}, {map.theta_n(r), 1.0}},
                            0.0,
                            indexed("angle_definition", l)});
    lay.loss_coupling_rows.push_back(static_cast<int>(prog.eq_rows.size()));
    prog.eq_rows.push_back(
        {{{map.p_o(l), X}, {map.q_o(l), -R}}, 0.0, indexed("loss_coupling", l)});
    lay.linear_angle_rows.push_back(static_cast<int>(prog.eq_rows.size()));
    prog.eq_rows.push_back({{{map.theta_l(l), 1.0}, {map.p_s(l), -X}, {map.q_s(l), R}},
                            0.0,
                            indexed("linear_angle", l)});

    // q_o V_s >= (p_s^2 + q_s^2) X  <=>  2 (q_o / 2X) V_s >= p_s^2 + q_s^2
    lay.loss_cones.push_back(static_cast<int>(prog.rsoc_blocks.size()));
    prog.rsoc_blocks.push_back({AffineExpr::var(map.q_o(l), 0.5 / X),
                                AffineExpr::var(map.V(s)),
                                {AffineExpr::var(map.p_s(l)), AffineExpr::var(map.q_s(l))},
                                indexed("loss_cone", l)});

    if (options.include_receiving_loss_cone) {
      lay.receiving_loss_cones.push_back(static_cast<int>(prog.rsoc_blocks.size()));
      prog.rsoc_blocks.push_back({AffineExpr::var(map.q_o(l), 0.5 / X),
                                  AffineExpr::var(map.V(r)),
                                  {AffineExpr{{{map.p_s(l), 1.0}, {map.p_o(l), -1.0}}, 0.0},
                                   AffineExpr{{{map.q_s(l), 1.0}, {map.q_o(l), -1.0}}, 0.0}},
                                  indexed("receiving_loss_cone", l)});
    }

    if (options.include_recovery_cone) {
      // V_s V_r sin^2(theta_max) >= theta_l^2
      const double k = std::sin(br.theta_max) / std::numbers::sqrt2;
      lay.recovery_cones.push_back(static_cast<int>(prog.rsoc_blocks.size()));
      prog.rsoc_blocks.push_back({AffineExpr::var(map.V(s), k),
                                  AffineExpr::var(map.V(r), k),
                                  {AffineExpr::var(map.theta_l(l))},
                                  indexed("recovery_cone", l)});
    }

    int amp_row = -1;
    if (options.include_loss_ampacity) {
      if (br.rated()) {
        // q_o <= (K_tilde - V_s B_s^2 + 2 q_s B_s) X
        amp_row = static_cast<int>(prog.le_rows.size());
        prog.le_rows.push_back({{{map.q_o(l), 1.0},
                                 {map.V(s), X * br.B_s * br.B_s},
                                 {map.q_s(l), -2.0 * X * br.B_s}},
                                X * br.K_tilde,
                                indexed("loss_ampacity", l)});
      } else {
        prog.warnings.push_back("branch " + std::to_string(l) +
                                ": unrated, loss ampacity bound omitted");
      }
    }
    lay.loss_ampacity_rows.push_back(amp_row);
  }
  return out;
}

}  // namespace

BuiltProgram build_soc_acopf(const Network& net, const FormulationOptions& options) {
  return build(net, options, nullptr);
}

BuiltProgram build_tightening_program(const Network& net, const Eigen::VectorXd& p_fixed,
                                      const FormulationOptions& options) {
  if (p_fixed.size() != static_cast<Eigen::Index>(net.generators.size())) {
    throw Error(ErrorCode::DimensionMismatch, "fixed generation vector has the wrong length");
  }
  return build(net, options, &p_fixed);
}

double compute_k_ol(const Branch& br, double V_s, double q_s) {
  return (br.K_tilde - V_s * br.B_s * br.B_s + 2.0 * q_s * br.B_s) * br.X;
}

double compute_k_ol_receiving(const Branch& br, double V_r, double q_r) {
  return (br.K_tilde - V_r * br.B_r * br.B_r + 2.0 * q_r * br.B_r) * br.X;
}

AcPoint AcPoint::zeros(const Network& net) {
  const auto G = static_cast<Eigen::Index>(net.generators.size());
  const auto L = static_cast<Eigen::Index>(net.branches.size());
  const auto N = static_cast<Eigen::Index>(net.buses.size());
  AcPoint p;
  p.p_g = Eigen::VectorXd::Zero(G);
  p.q_g = Eigen::VectorXd::Zero(G);
  p.p_s = Eigen::VectorXd::Zero(L);
  p.q_s = Eigen::VectorXd::Zero(L);
  p.p_o = Eigen::VectorXd::Zero(L);
  p.q_o = Eigen::VectorXd::Zero(L);
  p.theta_l = Eigen::VectorXd::Zero(L);
  p.V = Eigen::VectorXd::Ones(N);
  p.v = Eigen::VectorXd::Ones(N);
  p.theta_n = Eigen::VectorXd::Zero(N);
  return p;
}

double AcResiduals::max() const {
  return std::max({balance_p, balance_q, vdrop, sine, v_square, angle_definition, loss_p, loss_q,
                   ampacity, bounds, cycle});
}

double measurable_current_sq_sending(const Branch& br, double p_s, double q_s, double V_s) {
  const double qt = q_s - V_s * br.B_s;
  return (p_s * p_s + qt * qt) / V_s;
}

double measurable_current_sq_receiving(const Branch& br, double p_s, double q_s, double p_o,
                                       double q_o, double V_r) {
  // Flow from the receiving bus into the branch is (p_o - p_s, q_o - q_s).
  const double p_r = p_o - p_s;
  const double qt = (q_o - q_s) - V_r * br.B_r;
  return (p_r * p_r + qt * qt) / V_r;
}

AcResiduals eval_oacopf_residuals(const Network& net, const AcPoint& pt) {
  const auto G = static_cast<Eigen::Index>(net.generators.size());
  const auto L = static_cast<Eigen::Index>(net.branches.size());
  const auto N = static_cast<Eigen::Index>(net.buses.size());
  if (pt.p_g.size() != G || pt.q_g.size() != G || pt.p_s.size() != L || pt.q_s.size() != L ||
      pt.p_o.size() != L || pt.q_o.size() != L || pt.theta_l.size() != L || pt.V.size() != N ||
      pt.v.size() != N || pt.theta_n.size() != N) {
    throw Error(ErrorCode::DimensionMismatch, "AC point does not match the network");
  }
  AcResiduals res;
  Eigen::VectorXd p_net = -Eigen::VectorXd::Zero(N);
  Eigen::VectorXd q_net = Eigen::VectorXd::Zero(N);
  for (const auto& b : net.buses) {
    p_net[b.index] = -b.p_d - b.G * pt.V[b.index];
    q_net[b.index] = -b.q_d + b.B * pt.V[b.index];
  }
  for (const auto& g : net.generators) {
    p_net[g.bus] += pt.p_g[g.index];
    q_net[g.bus] += pt.q_g[g.index];
    res.bounds = std::max({res.bounds, g.p_min - pt.p_g[g.index], pt.p_g[g.index] - g.p_max,
                           g.q_min - pt.q_g[g.index], pt.q_g[g.index] - g.q_max});
  }
  for (const auto& br : net.branches) {
    const int l = br.index;
    const int s = br.from_bus;
    const int r = br.to_bus;
    p_net[s] -= pt.p_s[l];
    q_net[s] -= pt.q_s[l] - br.B_s * pt.V[s];
    p_net[r] -= -pt.p_s[l] + pt.p_o[l];
    q_net[r] -= -pt.q_s[l] + pt.q_o[l] - br.B_r * pt.V[r];

    const double R = br.R;
    const double X = br.X;
    res.vdrop = std::max(res.vdrop, std::abs(pt.V[s] - pt.V[r] - 2.0 * R * pt.p_s[l] -
                                             2.0 * X * pt.q_s[l] + R * pt.p_o[l] + X * pt.q_o[l]));
    res.sine = std::max(res.sine, std::abs(pt.v[s] * pt.v[r] * std::sin(pt.theta_l[l]) -
                                           (X * pt.p_s[l] - R * pt.q_s[l])));
    res.angle_definition = std::max(
        res.angle_definition, std::abs(pt.theta_l[l] - (pt.theta_n[s] - pt.theta_n[r])));
    const double i2 = (pt.p_s[l] * pt.p_s[l] + pt.q_s[l] * pt.q_s[l]) / pt.V[s];
    res.loss_p = std::max(res.loss_p, std::abs(pt.p_o[l] - i2 * R));
    res.loss_q = std::max(res.loss_q, std::abs(pt.q_o[l] - i2 * X));
    if (br.rated()) {
      const double is = measurable_current_sq_sending(br, pt.p_s[l], pt.q_s[l], pt.V[s]);
      const double ir = measurable_current_sq_receiving(br, pt.p_s[l], pt.q_s[l], pt.p_o[l],
                                                        pt.q_o[l], pt.V[r]);
      res.ampacity = std::max({res.ampacity, is - br.K_tilde, ir - br.K_tilde});
    }
    res.bounds = std::max({res.bounds, br.theta_min - pt.theta_l[l], pt.theta_l[l] - br.theta_max});
  }
  for (const auto& b : net.buses) {
    const int n = b.index;
    res.balance_p = std::max(res.balance_p, std::abs(p_net[n]));
    res.balance_q = std::max(res.balance_q, std::abs(q_net[n]));
    res.v_square = std::max(res.v_square, std::abs(pt.V[n] - pt.v[n] * pt.v[n]));
    res.bounds = std::max({res.bounds, b.v_min - pt.v[n], pt.v[n] - b.v_max,
                           b.theta_min - pt.theta_n[n], pt.theta_n[n] - b.theta_max});
  }

  // Fundamental cycles: chord angle against the tree path between its ends.
  const auto tree = spanning_tree(net);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(N);
  for (const auto& e : tree) {
    phi[e.child] = e.forward ? phi[e.parent] - pt.theta_l[e.branch]
                             : phi[e.parent] + pt.theta_l[e.branch];
  }
  for (int l : chord_branches(net)) {
    const auto& br = net.branches[l];
    const double sum = pt.theta_l[l] - (phi[br.from_bus] - phi[br.to_bus]);
    const double wrapped = std::remainder(sum, 2.0 * std::numbers::pi);
    res.cycle = std::max(res.cycle, std::abs(wrapped));
  }
  return res;
}

double eval_phasor_consistency(const Network& net, const AcPoint& pt) {
  double worst = 0.0;
  for (const auto& br : net.branches) {
    const int l = br.index;
    const int s = br.from_bus;
    const int r = br.to_bus;
    worst = std::max(worst, std::abs(pt.V[s] - pt.v[s] * pt.v[r] * std::cos(pt.theta_l[l]) -
                                     pt.p_s[l] * br.R - pt.q_s[l] * br.X));
  }
  return worst;
}

double generation_cost(const Network& net, const Eigen::VectorXd& p_g) {
  double cost = 0.0;
  for (const auto& g : net.generators) {
    const double p = p_g[g.index];
    cost += g.alpha * p * p + g.beta * p + g.gamma;
  }
  return cost;
}

Eigen::VectorXd map_to_soc_point(const Network& net, const VariableMap& map, const AcPoint& pt) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(map.dimension());
  for (const auto& g : net.generators) {
    x[map.p_g(g.index)] = pt.p_g[g.index];
    x[map.q_g(g.index)] = pt.q_g[g.index];
  }
  for (const auto& br : net.branches) {
    const int l = br.index;
    x[map.p_s(l)] = pt.p_s[l];
    x[map.q_s(l)] = pt.q_s[l];
    x[map.p_o(l)] = pt.p_o[l];
    x[map.q_o(l)] = pt.q_o[l];
    x[map.theta_l(l)] = pt.v[br.from_bus] * pt.v[br.to_bus] * std::sin(pt.theta_l[l]);
  }
  for (const auto& b : net.buses) x[map.V(b.index)] = pt.V[b.index];
  // Program node angles must difference to theta_hat, so integrate it along the
  // tree from the reference bus. Chords of a meshed network may not close.
  x[map.theta_n(net.reference_bus)] = pt.theta_n[net.reference_bus];
  for (const auto& e : spanning_tree(net)) {
    const double th = x[map.theta_l(e.branch)];
    x[map.theta_n(e.child)] = x[map.theta_n(e.parent)] + (e.forward ? -th : th);
  }
  if (map.has_load_variables) {
    for (const auto& b : net.buses) {
      x[map.p_d(b.index)] = b.p_d;
      x[map.q_d(b.index)] = b.q_d;
    }
  }
  return x;
}

}  // namespace socopf
