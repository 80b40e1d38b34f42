#include "socopf/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "socopf/errors.hpp"

namespace socopf {

VariableMap variable_map_for(const Network& net, Eigen::Index size) {
  VariableMap map;
  map.num_gens = static_cast<int>(net.generators.size());
  map.num_branches = static_cast<int>(net.branches.size());
  map.num_buses = static_cast<int>(net.buses.size());
  if (map.dimension() == size) return map;
  map.has_load_variables = true;
  if (map.dimension() == size) return map;
  throw Error(ErrorCode::DimensionMismatch,
              "solution has " + std::to_string(size) + " entries, network needs " +
                  std::to_string(VariableMap{map.num_gens, map.num_branches, map.num_buses, false}
                                     .dimension()));
}

std::string_view to_string(RecoveryStatus status) {
  switch (status) {
    case RecoveryStatus::GlobalOptimum: return "GlobalOptimum";
    case RecoveryStatus::FeasibleOnly: return "FeasibleOnly";
    case RecoveryStatus::NotTight: return "NotTight";
    case RecoveryStatus::ResidualViolation: return "ResidualViolation";
    case RecoveryStatus::CycleInconsistent: return "CycleInconsistent";
    case RecoveryStatus::ConditionViolated: return "ConditionViolated";
  }
  return "Unknown";
}

std::vector<double> check_recovery_condition(const Network& net, const SocSolution& sol) {
  const VariableMap map = variable_map_for(net, sol.x.size());
  std::vector<double> margins;
  margins.reserve(net.branches.size());
  for (const auto& br : net.branches) {
    const double sn = std::sin(br.theta_max);
    const double th = sol.x[map.theta_l(br.index)];
    margins.push_back(sol.x[map.V(br.from_bus)] * sol.x[map.V(br.to_bus)] * sn * sn - th * th);
  }
  return margins;
}

Recovery recover_ac_point(const Network& net, const SocSolution& sol, const RecoveryOptions& options) {
  const VariableMap map = variable_map_for(net, sol.x.size());
  const auto& x = sol.x;
  Recovery out;
  auto& pt = out.solution.point;
  pt = AcPoint::zeros(net);
  for (const auto& g : net.generators) {
    pt.p_g[g.index] = x[map.p_g(g.index)];
    pt.q_g[g.index] = x[map.q_g(g.index)];
  }
  for (const auto& b : net.buses) {
    // Negative V can only come from solver noise at a zero lower bound.
    pt.V[b.index] = x[map.V(b.index)];
    pt.v[b.index] = std::sqrt(std::max(0.0, pt.V[b.index]));
  }

  std::vector<int> condition;
  for (const auto& br : net.branches) {
    const int l = br.index;
    pt.p_s[l] = x[map.p_s(l)];
    pt.q_s[l] = x[map.q_s(l)];
    pt.p_o[l] = x[map.p_o(l)];
    pt.q_o[l] = x[map.q_o(l)];
    const double vv = pt.v[br.from_bus] * pt.v[br.to_bus];
    double ratio = vv > 0.0 ? x[map.theta_l(l)] / vv : (x[map.theta_l(l)] == 0.0 ? 0.0 : kInf);
    if (std::abs(ratio) > 1.0 + options.clip_tol || !std::isfinite(ratio)) condition.push_back(l);
    ratio = std::clamp(std::isfinite(ratio) ? ratio : std::copysign(1.0, x[map.theta_l(l)]), -1.0, 1.0);
    pt.theta_l[l] = std::asin(ratio);
  }

  for (const auto& e : spanning_tree(net)) {
    pt.theta_n[e.child] = e.forward ? pt.theta_n[e.parent] - pt.theta_l[e.branch]
                                    : pt.theta_n[e.parent] + pt.theta_l[e.branch];
  }
  std::vector<int> bad_cycles;
  for (int l : chord_branches(net)) {
    const auto& br = net.branches[l];
    const double sum = pt.theta_l[l] - (pt.theta_n[br.from_bus] - pt.theta_n[br.to_bus]);
    const double wrapped = std::remainder(sum, 2.0 * std::numbers::pi);
    out.solution.cycle_residuals.push_back(wrapped);
    if (std::abs(wrapped) > options.cycle_tol) bad_cycles.push_back(l);
  }

  std::vector<int> loose;
  for (const auto& br : net.branches) {
    const int l = br.index;
    const double gap_qo = pt.q_o[l] - (pt.p_s[l] * pt.p_s[l] + pt.q_s[l] * pt.q_s[l]) / pt.V[br.from_bus] * br.X;
    if (!(gap_qo <= options.tight_tol)) loose.push_back(l);
  }

  auto& res = out.solution.max_residuals;
  res = eval_oacopf_residuals(net, pt);
  out.solution.objective = generation_cost(net, pt.p_g);
  out.solution.is_feasible = condition.empty() && res.max() <= options.feas_tol;

  auto& oc = out.outcome;
  if (!condition.empty()) {
    oc.status = RecoveryStatus::ConditionViolated;
    oc.violated_branches = condition;
    oc.message = "theta_hat exceeds v_s v_r on " + std::to_string(condition.size()) + " branch(es)";
  } else if (!bad_cycles.empty()) {
    oc.status = RecoveryStatus::CycleInconsistent;
    oc.violated_branches = bad_cycles;
    oc.message = std::to_string(bad_cycles.size()) + " cycle(s) do not close";
  } else if (out.solution.is_feasible) {
    const bool global = loose.empty() && sol.optimal();
    oc.status = global ? RecoveryStatus::GlobalOptimum : RecoveryStatus::FeasibleOnly;
    out.solution.is_global_certificate = global;
    if (!global) oc.message = sol.optimal() ? "loss gap above tight_tol" : "SOC solution not optimal";
  } else if (!loose.empty()) {
    oc.status = RecoveryStatus::NotTight;
    oc.violated_branches = loose;
    oc.message = std::to_string(loose.size()) + " loss cone(s) not tight";
  } else {
    oc.status = RecoveryStatus::ResidualViolation;
    oc.message = "o-ACOPF residual " + std::to_string(res.max()) + " above tolerance";
  }
  return out;
}

}  // namespace socopf
