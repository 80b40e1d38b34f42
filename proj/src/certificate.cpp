#include <algorithm>
#include <cmath>

#include "socopf/conic_solver.hpp"
#include "socopf/errors.hpp"

namespace socopf {

SolverCertificate check_certificate(const ConicProgram& program, const SocSolution& solution) {
  const StandardForm form = lower_to_standard_form(program);
  return check_certificate(form, solution.x, solution.s, solution.z);
}

double primal_violation(const ConicProgram& program, const Eigen::VectorXd& x) {
  if (x.size() != program.num_vars()) {
    throw Error(ErrorCode::DimensionMismatch, "point does not match the program");
  }
  double worst = 0.0;
  for (int j = 0; j < program.num_vars(); ++j) {
    worst = std::max({worst, program.lower[j] - x[j], x[j] - program.upper[j]});
  }
  for (const auto& r : program.eq_rows) worst = std::max(worst, std::abs(r.eval(x) - r.rhs));
  for (const auto& r : program.le_rows) worst = std::max(worst, r.eval(x) - r.rhs);
  for (const auto& c : program.soc_blocks) {
    double w2 = 0.0;
    for (const auto& w : c.w) w2 += std::pow(w.eval(x), 2);
    worst = std::max(worst, std::sqrt(w2) - c.t.eval(x));
  }
  for (const auto& c : program.rsoc_blocks) {
    const double u = c.u.eval(x);
    const double v = c.v.eval(x);
    double w2 = 0.0;
    for (const auto& w : c.w) w2 += std::pow(w.eval(x), 2);
    // Distance-like measure in the equivalent second-order-cone coordinates.
    const double t = (u + v) / std::sqrt(2.0);
    const double r = std::sqrt(std::pow((u - v) / std::sqrt(2.0), 2) + w2);
    worst = std::max(worst, r - t);
  }
  return worst;
}

}  // namespace socopf
