#include "socopf/conic_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "socopf/cones.hpp"
#include "socopf/errors.hpp"
#include "socopf/sparse_ldl.hpp"

namespace socopf {

using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

void SolverSettings::validate() const {
  if (!(tol_gap > 0.0) || !(tol_primal > 0.0) || !(tol_dual > 0.0) || !(tol_infeasible > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerances must be positive");
  }
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  if (static_regularization < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "static_regularization must be >= 0");
  }
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::NumericalLimit: return "NumericalLimit";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

namespace {

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

/// y = P x for P stored as an upper triangle.
VectorXd sym_mul(const SpMat& upper, const VectorXd& x) {
  return upper.selfadjointView<Eigen::Upper>() * x;
}

/// Column inf-norms of the full symmetric matrix stored in `upper`.
VectorXd sym_col_norms(const SpMat& upper) {
  VectorXd norms = VectorXd::Zero(upper.cols());
  for (int j = 0; j < upper.outerSize(); ++j) {
    for (SpMat::InnerIterator it(upper, j); it; ++it) {
      const double a = std::abs(it.value());
      norms[j] = std::max(norms[j], a);
      norms[it.row()] = std::max(norms[it.row()], a);
    }
  }
  return norms;
}

struct Scaling {
  VectorXd D;  // x = D x_scaled
  VectorXd E;  // s_scaled = E s
  double c = 1.0;
};

/// Modified Ruiz equilibration; cone blocks share one row scale.
Scaling equilibrate(StandardForm& f, const ConeProduct& cones, int iterations) {
  Scaling sc;
  sc.D = VectorXd::Ones(f.n);
  sc.E = VectorXd::Ones(f.m);
  auto clamp = [](double v) {
    if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
    return std::clamp(1.0 / std::sqrt(v), 1e-4, 1e4);
  };
  for (int it = 0; it < iterations; ++it) {
    VectorXd dD = sym_col_norms(f.P);
    VectorXd dE = VectorXd::Zero(f.m);
    for (int j = 0; j < f.A.outerSize(); ++j) {
      for (SpMat::InnerIterator e(f.A, j); e; ++e) {
        const double a = std::abs(e.value());
        dD[j] = std::max(dD[j], a);
        dE[e.row()] = std::max(dE[e.row()], a);
      }
    }
    for (int j = 0; j < f.n; ++j) dD[j] = clamp(dD[j]);
    for (int i = 0; i < f.m; ++i) dE[i] = clamp(dE[i]);
    for (const auto& blk : cones.blocks()) {
      const double mean = dE.segment(blk.offset, blk.dim).mean();
      dE.segment(blk.offset, blk.dim).setConstant(mean);
    }
    for (int j = 0; j < f.P.outerSize(); ++j) {
      for (SpMat::InnerIterator e(f.P, j); e; ++e) e.valueRef() *= dD[e.row()] * dD[j];
    }
    for (int j = 0; j < f.A.outerSize(); ++j) {
      for (SpMat::InnerIterator e(f.A, j); e; ++e) e.valueRef() *= dE[e.row()] * dD[j];
    }
    sc.D.array() *= dD.array();
    sc.E.array() *= dE.array();
  }
  f.q = sc.D.asDiagonal() * f.q;
  f.b = sc.E.asDiagonal() * f.b;

  const VectorXd pn = sym_col_norms(f.P);
  double cost = f.n > 0 ? pn.mean() : 0.0;
  cost = std::max(cost, inf_norm(f.q));
  sc.c = (cost > 0.0 && std::isfinite(cost)) ? std::clamp(1.0 / cost, 1e-4, 1e4) : 1.0;
  f.P *= sc.c;
  f.q *= sc.c;
  return sc;
}

/// Solves the Newton system [P, A'; A, -H] [dx; dz] = [r1; r2] with H = W'W
/// through the scaled quasi-definite matrix [P + dI, (W^-T A)'; W^-T A, -(I + dI)]
/// in the unknowns (dx, W dz). Forming H explicitly squares the conditioning of
/// W, which near the boundary of a cone costs most of the available digits.
/// Zero-cone rows keep H = 0. The pattern is fixed; cone blocks share the
/// column union of their rows.
class Kkt {
 public:
  Kkt(const StandardForm& f, const ConeProduct& cones, double delta, int refinement_steps)
      : n_(f.n), m_(f.m), zero_(cones.zero()), nonneg_(cones.nonneg()), delta_(delta),
        refinement_steps_(refinement_steps) {
    const SpMat At = f.A.transpose();  // column i holds row i of A
    const auto& blocks = cones.blocks();
    std::vector<Eigen::Triplet<double>> t;
    for (int j = 0; j < f.P.outerSize(); ++j) {
      for (SpMat::InnerIterator e(f.P, j); e; ++e) {
        if (e.row() <= j) t.emplace_back(e.row(), j, 1.0);
      }
    }
    for (int i = 0; i < zero_ + nonneg_; ++i) {
      for (SpMat::InnerIterator e(At, i); e; ++e) t.emplace_back(e.row(), n_ + i, 1.0);
    }
    blocks_.resize(blocks.size());
    for (size_t bi = 0; bi < blocks.size(); ++bi) {
      auto& bk = blocks_[bi];
      bk.offset = blocks[bi].offset;
      bk.dim = blocks[bi].dim;
      for (int a = 0; a < bk.dim; ++a) {
        for (SpMat::InnerIterator e(At, bk.offset + a); e; ++e) bk.cols.push_back(static_cast<int>(e.row()));
      }
      std::sort(bk.cols.begin(), bk.cols.end());
      bk.cols.erase(std::unique(bk.cols.begin(), bk.cols.end()), bk.cols.end());
      bk.a.setZero(bk.dim, static_cast<Eigen::Index>(bk.cols.size()));
      for (int a = 0; a < bk.dim; ++a) {
        for (SpMat::InnerIterator e(At, bk.offset + a); e; ++e) {
          const auto c = std::lower_bound(bk.cols.begin(), bk.cols.end(), e.row()) - bk.cols.begin();
          bk.a(a, c) = e.value();
        }
        for (int c : bk.cols) t.emplace_back(c, n_ + bk.offset + a, 1.0);
      }
      bk.m.setIdentity(bk.dim, bk.dim);
    }
    for (int k = 0; k < n_ + m_; ++k) t.emplace_back(k, k, 1.0);
    K_.resize(n_ + m_, n_ + m_);
    K_.setFromTriplets(t.begin(), t.end());
    K_.makeCompressed();
    base_.assign(K_.nonZeros(), 0.0);
    double* v0 = K_.valuePtr();
    for (int j = 0; j < f.P.outerSize(); ++j) {
      for (SpMat::InnerIterator e(f.P, j); e; ++e) {
        if (e.row() <= j) base_[&K_.coeffRef(e.row(), j) - v0] += e.value();
      }
    }
    for (int i = 0; i < zero_ + nonneg_; ++i) {
      for (SpMat::InnerIterator e(At, i); e; ++e) {
        rows_.push_back({i, &K_.coeffRef(e.row(), n_ + i) - v0, e.value()});
      }
    }
    for (auto& bk : blocks_) {
      for (int a = 0; a < bk.dim; ++a) {
        for (int c : bk.cols) bk.pos.push_back(&K_.coeffRef(c, n_ + bk.offset + a) - v0);
      }
    }
    diag_.resize(n_ + m_);
    for (int k = 0; k < n_ + m_; ++k) diag_[k] = &K_.coeffRef(k, k) - v0;
    for (int i = zero_; i < m_; ++i) base_[diag_[n_ + i]] = -1.0;
    row_scale_.setOnes(m_);
    Ktrue_ = K_;
    std::vector<int> signs(n_ + m_, 1);
    for (int i = 0; i < m_; ++i) signs[n_ + i] = -1;
    ldl_.analyze(K_, signs);
  }

  /// identity = true uses W = I on every non-zero cone row (initialization).
  /// Escalates the static regularization while the factor breaks down;
  /// returns false if it never succeeds.
  bool factor(const ConeProduct& cones, bool identity) {
    double* tv = Ktrue_.valuePtr();
    std::copy(base_.begin(), base_.end(), tv);
    for (int i = zero_; i < zero_ + nonneg_; ++i) {
      row_scale_[i] = identity ? 1.0 : 1.0 / cones.nonneg_scale(i);
    }
    for (const auto& r : rows_) tv[r.pos] = r.value * row_scale_[r.row];
    for (size_t bi = 0; bi < blocks_.size(); ++bi) {
      auto& bk = blocks_[bi];
      if (identity) {
        bk.m.setIdentity(bk.dim, bk.dim);
      } else {
        bk.m = cones.winv_t_block(static_cast<int>(bi));
      }
      const Eigen::MatrixXd ma = bk.m * bk.a;
      size_t k = 0;
      for (int a = 0; a < bk.dim; ++a) {
        for (Eigen::Index c = 0; c < ma.cols(); ++c) tv[bk.pos[k++]] = ma(a, c);
      }
    }
    delta_now_ = delta_;
    return refactor();
  }

  /// Solves the unscaled system for rhs = [r1; r2] and returns [dx; dz].
  /// `scaled_dz`, when given, receives W dz from the factor directly.
  VectorXd solve(const VectorXd& rhs, VectorXd* scaled_dz = nullptr) {
    VectorXd scaled = rhs;
    auto r2 = scaled.tail(m_);
    r2.array() *= row_scale_.array();
    for (const auto& bk : blocks_) r2.segment(bk.offset, bk.dim) = bk.m * rhs.segment(n_ + bk.offset, bk.dim);
    VectorXd out = solve_scaled(scaled);
    auto u = out.tail(m_);
    if (scaled_dz) *scaled_dz = u;
    for (const auto& bk : blocks_) {
      const VectorXd ub = u.segment(bk.offset, bk.dim);
      u.segment(bk.offset, bk.dim) = bk.m.transpose() * ub;
    }
    u.array() *= row_scale_.array();
    return out;
  }

 private:
  static constexpr double kMaxDelta = 1e-3;

  /// Factor of the regularized matrix plus iterative refinement against the
  /// unregularized one, stopping once a step improves the residual less than 5x.
  /// An inaccurate result triggers a refactorization with larger regularization.
  VectorXd solve_scaled(const VectorXd& rhs) {
    const double target = 1e-13 * (1.0 + inf_norm(rhs));
    const double acceptable = 1e-6 * (1.0 + inf_norm(rhs));
    VectorXd best;
    double best_norm = std::numeric_limits<double>::infinity();
    double best_delta = delta_now_;
    for (;;) {
      VectorXd x = rhs;
      ldl_.solve(x);
      VectorXd r = rhs - sym_mul(Ktrue_, x);
      double norm = inf_norm(r);
      for (int step = 0; step < refinement_steps_ && norm > target; ++step) {
        ldl_.solve(r);
        const VectorXd trial = x + r;
        r = rhs - sym_mul(Ktrue_, trial);
        const double next = inf_norm(r);
        if (!(next < norm)) break;
        x = trial;
        const bool slow = next * 5.0 > norm;
        norm = next;
        if (slow) break;
      }
      if (norm < best_norm) {
        best = std::move(x);
        best_norm = norm;
        best_delta = delta_now_;
      } else {
        // More regularization made things worse: go back to the best factor.
        delta_now_ = best_delta;
        refactor();
        break;
      }
      if (best_norm <= acceptable || delta_now_ >= kMaxDelta) break;
      delta_now_ = std::max(delta_now_ * 10.0, 1e-10);
      if (!refactor()) {
        delta_now_ = best_delta;
        refactor();
        break;
      }
    }
    return best.size() ? best : VectorXd::Constant(rhs.size(), std::numeric_limits<double>::quiet_NaN());
  }

  /// Factors Ktrue + regularization, escalating while pivots come out non-finite.
  bool refactor() {
    double* kv = K_.valuePtr();
    const double* tv = Ktrue_.valuePtr();
    for (;;) {
      std::copy(tv, tv + Ktrue_.nonZeros(), kv);
      for (int k = 0; k < n_; ++k) kv[diag_[k]] += delta_now_;
      for (int k = n_; k < n_ + m_; ++k) kv[diag_[k]] -= delta_now_;
      if (ldl_.factor(K_) >= 0) return true;
      if (delta_now_ >= kMaxDelta) return false;
      delta_now_ = std::max(delta_now_ * 100.0, 1e-10);
    }
  }

  struct RowEntry {
    int row;
    long pos;
    double value;
  };
  struct BlockRows {
    int offset = 0;
    int dim = 0;
    std::vector<int> cols;
    Eigen::MatrixXd a;  // rows of A restricted to cols
    Eigen::MatrixXd m;  // current W^-T
    std::vector<long> pos;
  };

  int n_;
  int m_;
  int zero_;
  int nonneg_;
  double delta_;
  double delta_now_ = 0.0;
  int refinement_steps_;
  SpMat K_;
  SpMat Ktrue_;
  std::vector<double> base_;
  std::vector<long> diag_;
  std::vector<RowEntry> rows_;
  std::vector<BlockRows> blocks_;
  VectorXd row_scale_;
  SparseLdl ldl_;
};

struct Step {
  VectorXd x;
  VectorXd z;
  VectorXd s;
  double tau = 0.0;
  double kappa = 0.0;
};

}  // namespace

SolverCertificate check_certificate(const StandardForm& f, const VectorXd& x, const VectorXd& s,
                                    const VectorXd& z) {
  if (x.size() != f.n || s.size() != f.m || z.size() != f.m) {
    throw Error(ErrorCode::DimensionMismatch, "certificate vectors do not match the program");
  }
  const ConeProduct cones(f);
  const VectorXd Px = sym_mul(f.P, x);
  SolverCertificate c;
  const double xPx = x.dot(Px);
  c.objective_primal = 0.5 * xPx + f.q.dot(x) + f.c0;
  c.objective_dual = -0.5 * xPx - f.b.dot(z) + f.c0;
  const double rp = std::max(inf_norm(f.A * x + s - f.b), cones.violation(s));
  const VectorXd rd_vec = Px + f.A.transpose() * z + f.q;
  const double rd = std::max(inf_norm(rd_vec), cones.violation(z, true));
  c.primal_residual = rp / std::max(1.0, inf_norm(f.b));
  c.dual_residual = rd / std::max(1.0, inf_norm(f.q));
  c.duality_gap = std::abs(c.objective_primal - c.objective_dual) /
                  std::max(1.0, std::min(std::abs(c.objective_primal), std::abs(c.objective_dual)));
  return c;
}

namespace {

StandardSolution solve_once(const StandardForm& original, const SolverSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  StandardSolution out;
  auto finish = [&](SolveStatus status, std::string message) {
    out.status = status;
    out.message = std::move(message);
    out.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  const int n = original.n;
  const int m = original.m;
  ConeProduct cones(original);
  StandardForm f = original;
  f.P.makeCompressed();
  f.A.makeCompressed();
  const Scaling sc = equilibrate(f, cones, settings.equilibration_iterations);
  const double nu = cones.degree();

  Kkt kkt(f, cones, settings.static_regularization, settings.refinement_steps);

  // Initial point from the regularized least-squares system with H = I.
  VectorXd x(n), z(m), s(m);
  {
    if (!kkt.factor(cones, true)) {
      return finish(SolveStatus::NumericalLimit, "KKT factorization failed at initialization");
    }
    VectorXd rhs(n + m);
    rhs << -f.q, f.b;
    const VectorXd sol = kkt.solve(rhs);
    x = sol.head(n);
    z = sol.tail(m);
    s = -z;
    s.head(cones.zero()).setZero();
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
    const double as = cones.min_eigenvalue(s);
    if (as < eps) cones.add_identity(s, 1.0 - as);
    const double az = cones.min_eigenvalue(z);
    if (az < eps) cones.add_identity(z, 1.0 - az);
  }
  double tau = 1.0;
  double kappa = 1.0;

  auto unscaled = [&](double t, VectorXd& xo, VectorXd& so, VectorXd& zo) {
    xo = sc.D.cwiseProduct(x) / t;
    so = s.cwiseQuotient(sc.E) / t;
    zo = sc.E.cwiseProduct(z) / (sc.c * t);
  };

  VectorXd x1, z1, u1, lam_aff, tmp, tmp2;
  int stalls = 0;
  for (int iter = 0;; ++iter) {
    out.iterations = iter;
    const VectorXd Px = sym_mul(f.P, x);
    const double xPx = x.dot(Px);
    const VectorXd rx = Px + f.A.transpose() * z + f.q * tau;
    const VectorXd rz = f.A * x + s - f.b * tau;
    const double rtau = kappa + f.q.dot(x) + f.b.dot(z) + xPx / tau;

    // Termination on the unscaled problem.
    unscaled(tau, out.x, out.s, out.z);
    out.certificate = check_certificate(original, out.x, out.s, out.z);
    const auto& cert = out.certificate;
    if (settings.verbose) {
      std::fprintf(stderr, "%3d  p=% .9e d=% .9e rp=%.2e rd=%.2e gap=%.2e tau=%.2e kap=%.2e\n",
                   iter, cert.objective_primal, cert.objective_dual, cert.primal_residual,
                   cert.dual_residual, cert.duality_gap, tau, kappa);
    }
    if (cert.primal_residual <= settings.tol_primal && cert.dual_residual <= settings.tol_dual &&
        cert.duality_gap <= settings.tol_gap) {
      return finish(SolveStatus::Optimal, "converged");
    }

    // Infeasibility from unnormalized directions.
    {
      VectorXd zd = sc.E.cwiseProduct(z) / sc.c;
      const double zn = inf_norm(zd);
      if (zn > 0.0) zd /= zn;
      const double bz = original.b.dot(zd);
      VectorXd xd = sc.D.cwiseProduct(x);
      VectorXd sd = s.cwiseQuotient(sc.E);
      const double xn = inf_norm(xd);
      if (xn > 0.0) {
        xd /= xn;
        sd /= xn;
      }
      const double qx = original.q.dot(xd);
      const bool small_tau = tau < settings.tol_infeasible * kappa;
      if (bz < 0.0 &&
          (inf_norm(original.A.transpose() * zd) <= settings.tol_infeasible * -bz || small_tau)) {
        out.x.setZero(n);
        out.s.setZero(m);
        out.z = zd;
        return finish(SolveStatus::Infeasible, "primal infeasibility certificate found");
      }
      if (qx < 0.0 && ((inf_norm(sym_mul(original.P, xd)) <= settings.tol_infeasible * -qx &&
                        inf_norm(original.A * xd + sd) <= settings.tol_infeasible * -qx) ||
                       small_tau)) {
        out.x = xd;
        out.s = sd;
        out.z.setZero(m);
        return finish(SolveStatus::Unbounded, "dual infeasibility certificate found");
      }
      if (small_tau) return finish(SolveStatus::NumericalLimit, "tau vanished without a certificate");
    }

    if (iter >= settings.max_iterations) {
      return finish(SolveStatus::IterationLimit, "iteration limit reached");
    }
    if (!cones.update_scaling(s, z)) {
      return finish(SolveStatus::NumericalLimit, "iterate left the cone interior");
    }
    if (!kkt.factor(cones, false)) {
      return finish(SolveStatus::NumericalLimit,
                    "KKT factorization broke down after regularization escalation");
    }
    {
      VectorXd rhs(n + m);
      rhs << -f.q, f.b;
      const VectorXd sol = kkt.solve(rhs, &u1);
      x1 = sol.head(n);
      z1 = sol.tail(m);
    }
    const VectorXd xi = x / tau;
    const VectorXd x1xi = x1 - xi;
    const double den = -kappa / tau - x1xi.dot(sym_mul(f.P, x1xi)) - u1.tail(m - cones.zero()).squaredNorm();
    const VectorXd qP = f.q + 2.0 * sym_mul(f.P, xi);

    auto direction = [&](double frac, const VectorXd& d_s, double d_kappa) {
      Step st;
      cones.lambda_solve(d_s, tmp);
      VectorXd ds_tilde;
      cones.mul_w_t(tmp, ds_tilde);
      VectorXd rhs(n + m);
      rhs << -frac * rx, -frac * rz + ds_tilde;
      const VectorXd sol = kkt.solve(rhs);
      const VectorXd x2 = sol.head(n);
      const VectorXd z2 = sol.tail(m);
      const double num = -frac * rtau + d_kappa / tau - qP.dot(x2) - f.b.dot(z2);
      st.tau = num / den;
      st.x = x2 + st.tau * x1;
      st.z = z2 + st.tau * z1;
      // ds from the linearized primal rows; the complementarity form
      // -W'(lambda \ d_s + W dz) cancels badly near the cone boundary.
      st.s = -frac * rz - f.A * st.x + f.b * st.tau;
      st.s.head(cones.zero()).setZero();
      st.kappa = -(d_kappa + kappa * st.tau) / tau;
      return st;
    };
    auto max_step = [&](const Step& st, double cap) {
      double a = std::min(cones.step_length(s, st.s, cap), cones.step_length(z, st.z, cap));
      if (st.tau < 0.0) a = std::min(a, -tau / st.tau);
      if (st.kappa < 0.0) a = std::min(a, -kappa / st.kappa);
      return a;
    };

    // Predictor.
    const VectorXd& lam = cones.lambda();
    VectorXd d_s;
    cones.circ(lam, lam, d_s);
    const Step aff = direction(1.0, d_s, tau * kappa);
    const double alpha_aff = max_step(aff, 1.0);
    const double sigma = std::pow(1.0 - alpha_aff, 3);
    const double mu = (s.dot(z) + tau * kappa) / (nu + 1.0);

    // Corrector with second-order term.
    cones.mul_winv_t(aff.s, tmp);
    cones.mul_w(aff.z, tmp2);
    VectorXd cross;
    cones.circ(tmp, tmp2, cross);
    d_s += cross;
    cones.add_scaled_identity(d_s, -sigma * mu);
    const double d_kappa = tau * kappa + aff.tau * aff.kappa - sigma * mu;
    const Step st = direction(1.0 - sigma, d_s, d_kappa);
    if (!st.x.allFinite() || !st.z.allFinite() || !st.s.allFinite() || !std::isfinite(st.tau)) {
      return finish(SolveStatus::NumericalLimit, "non-finite search direction");
    }
    const double alpha = std::min(1.0, 0.99 * max_step(st, 1.0 / 0.99));

    if (alpha < 1e-10) {
      if (++stalls >= 3) return finish(SolveStatus::NumericalLimit, "step length collapsed");
    } else {
      stalls = 0;
    }
    x += alpha * st.x;
    z += alpha * st.z;
    s += alpha * st.s;
    tau += alpha * st.tau;
    kappa += alpha * st.kappa;
    s.head(cones.zero()).setZero();
  }
}

}  // namespace

StandardSolution InteriorPointSolver::solve(const StandardForm& form,
                                            const SolverSettings& settings) const {
  settings.validate();
  // A breakdown is retried from scratch with 10x and 100x static regularization.
  SolverSettings attempt = settings;
  StandardSolution out;
  double seconds = 0.0;
  for (int k = 0; k < 3; ++k) {
    out = solve_once(form, attempt);
    seconds += out.solve_seconds;
    if (out.status != SolveStatus::NumericalLimit) break;
    attempt.static_regularization = std::max(attempt.static_regularization * 10.0, 1e-10);
    if (settings.verbose) {
      std::fprintf(stderr, "retrying with static regularization %.1e\n", attempt.static_regularization);
    }
  }
  out.solve_seconds = seconds;
  return out;
}

SocSolution ConicSolver::solve(const ConicProgram& program, const SolverSettings& settings) const {
  RowMap rows;
  const StandardForm form = lower_to_standard_form(program, &rows);
  StandardSolution r = solve(form, settings);
  SocSolution out;
  out.status = r.status;
  out.x = std::move(r.x);
  out.s = std::move(r.s);
  out.z = std::move(r.z);
  out.y_eq = out.z.segment(rows.eq_begin, static_cast<Eigen::Index>(program.eq_rows.size()));
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (r.status) {
    case SolveStatus::Infeasible: out.objective_value = inf; break;
    case SolveStatus::Unbounded: out.objective_value = -inf; break;
    default: out.objective_value = program.objective(out.x); break;
  }
  out.iterations = r.iterations;
  out.solve_seconds = r.solve_seconds;
  out.certificate = r.certificate;
  out.message = std::move(r.message);
  return out;
}

SocSolution solve(const ConicProgram& program, const SolverSettings& settings) {
  return InteriorPointSolver{}.solve(program, settings);
}

}  // namespace socopf
