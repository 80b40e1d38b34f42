#include "socopf/gap_analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

#include "socopf/errors.hpp"

namespace socopf {

GapReport compute_gaps(const Network& net, const SocSolution& sol, double load_factor) {
  const VariableMap map = variable_map_for(net, sol.x.size());
  const auto& x = sol.x;
  GapReport rep;
  rep.objective = sol.objective_value;
  rep.load_factor = load_factor;
  for (const auto& br : net.branches) {
    const int l = br.index;
    const double ps = x[map.p_s(l)];
    const double qs = x[map.q_s(l)];
    const double i2 = (ps * ps + qs * qs) / x[map.V(br.from_bus)];
    BranchGap g{l, x[map.p_o(l)] - i2 * br.R, x[map.q_o(l)] - i2 * br.X};
    if (rep.argmax_branch_po < 0 || g.gap_po > rep.gap_po_max) {
      rep.gap_po_max = g.gap_po;
      rep.argmax_branch_po = l;
    }
    if (rep.argmax_branch_qo < 0 || g.gap_qo > rep.gap_qo_max) {
      rep.gap_qo_max = g.gap_qo;
      rep.argmax_branch_qo = l;
    }
    rep.per_branch.push_back(g);
  }
  return rep;
}

TighteningResult tighten_by_load_increase(const Network& net, const SocSolution& sol,
                                          const FormulationOptions& formulation,
                                          const SolverSettings& settings, double tight_tol) {
  const GapReport before = compute_gaps(net, sol);
  if (before.gap_po_max <= tight_tol && before.gap_qo_max <= tight_tol) {
    return {net, sol, before};
  }
  const VariableMap map = variable_map_for(net, sol.x.size());
  Eigen::VectorXd p_fixed(static_cast<Eigen::Index>(net.generators.size()));
  for (const auto& g : net.generators) p_fixed[g.index] = sol.x[map.p_g(g.index)];

  const BuiltProgram built = build_tightening_program(net, p_fixed, formulation);
  SocSolution re = solve(built.program, settings);
  if (!re.optimal()) {
    throw Error(ErrorCode::TightenInfeasible,
                "tightening re-solve ended with status " + std::string(to_string(re.status)));
  }

  const auto& tm = built.layout.map;
  TighteningResult out;
  out.network = net;
  for (auto& b : out.network.buses) {
    const double pd = std::max(b.p_d, re.x[tm.p_d(b.index)]);
    const double qd = std::max(b.q_d, re.x[tm.q_d(b.index)]);
    out.report.load_increase.push_back({b.index, pd - b.p_d, qd - b.q_d});
    b.p_d = pd;
    b.q_d = qd;
  }
  VariableMap plain = tm;
  plain.has_load_variables = false;
  re.x.conservativeResize(plain.dimension());
  re.objective_value = generation_cost(net, p_fixed);
  out.solution = std::move(re);

  GapReport after = compute_gaps(out.network, out.solution, before.load_factor);
  after.tightened = true;
  after.load_increase = std::move(out.report.load_increase);
  out.report = std::move(after);
  return out;
}

int sweep_threads(int requested, int jobs) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("SOCOPF_THREADS")) {
      const int cap = std::atoi(env);
      if (cap > 0) n = std::min(n, cap);
    }
  }
  return std::max(1, std::min(n, jobs));
}

SweepResult load_sweep(const Network& net, const std::vector<double>& factors,
                       const SweepOptions& options) {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (!(factors[i] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "load factors must be >= 0");
    if (i > 0 && factors[i] < factors[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "load factors must be ascending");
    }
  }
  SweepResult out;
  out.items.resize(factors.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < factors.size(); i = next++) {
      SweepItem& item = out.items[i];
      item.factor = factors[i];
      try {
        const Network scaled = scale_loads(net, factors[i]);
        const BuiltProgram built = build_soc_acopf(scaled, options.formulation);
        item.solution = solve(built.program, options.settings);
        if (item.solution.optimal()) {
          item.report = compute_gaps(scaled, item.solution, factors[i]);
          Recovery rec = recover_ac_point(scaled, item.solution, options.recovery);
          item.recovery = std::move(rec.outcome);
          item.recovered = std::move(rec.solution);
        } else {
          item.report.load_factor = factors[i];
          item.report.objective = item.solution.objective_value;
        }
      } catch (const std::exception& e) {
        item.error = e.what();
      }
    }
  };
  const int threads = sweep_threads(options.threads, static_cast<int>(factors.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const SweepItem* prev = nullptr;
  for (const auto& item : out.items) {
    if (!item.ok()) continue;
    if (prev && item.solution.objective_value < prev->solution.objective_value - options.monotone_slack) {
      out.monotone = false;
    }
    prev = &item;
  }
  return out;
}

}  // namespace socopf
