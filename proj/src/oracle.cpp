#include "socopf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "socopf/errors.hpp"

namespace socopf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// ---------------------------------------------------------------------------
// Brute-force AC search

struct Coord {
  int bus = 0;
  bool power = false;  // total active output of the bus instead of v
  double lo = 0.0;
  double hi = 0.0;
  double bound_lo = 0.0;
  double bound_hi = 0.0;
  int steps = 3;

  double pitch() const { return (hi - lo) / (steps - 1); }
  double at(int k) const { return k == steps - 1 ? hi : lo + k * pitch(); }
};

/// Series flows and losses of every branch from (v, theta), in closed form.
void branch_flows(const Network& net, AcPoint& pt) {
  for (const auto& br : net.branches) {
    const int l = br.index;
    const double vs = pt.v[br.from_bus];
    const double vr = pt.v[br.to_bus];
    const double t = pt.theta_n[br.from_bus] - pt.theta_n[br.to_bus];
    const double z2 = br.R * br.R + br.X * br.X;
    const double a = vs - vr * std::cos(t);
    const double b = vr * std::sin(t);
    pt.p_s[l] = vs * (a * br.R + b * br.X) / z2;
    pt.q_s[l] = vs * (a * br.X - b * br.R) / z2;
    const double i2 = (pt.p_s[l] * pt.p_s[l] + pt.q_s[l] * pt.q_s[l]) / (vs * vs);
    pt.p_o[l] = br.R * i2;
    pt.q_o[l] = br.X * i2;
    pt.theta_l[l] = t;
  }
  pt.V = pt.v.cwiseProduct(pt.v);
}

/// Generation each bus must supply for the flows in `pt`.
void required_injection(const Network& net, const AcPoint& pt, VectorXd& P, VectorXd& Q) {
  const auto N = static_cast<Eigen::Index>(net.buses.size());
  P.resize(N);
  Q.resize(N);
  for (const auto& b : net.buses) {
    P[b.index] = b.p_d + b.G * pt.V[b.index];
    Q[b.index] = b.q_d - b.B * pt.V[b.index];
  }
  for (const auto& br : net.branches) {
    const int l = br.index;
    const int s = br.from_bus;
    const int r = br.to_bus;
    P[s] += pt.p_s[l];
    Q[s] += pt.q_s[l] - br.B_s * pt.V[s];
    P[r] += -pt.p_s[l] + pt.p_o[l];
    Q[r] += -pt.q_s[l] + pt.q_o[l] - br.B_r * pt.V[r];
  }
}

/// Least-cost split of P among the generators at one bus (equal incremental
/// cost by bisection on lambda). P is clamped into the aggregate limits.
void dispatch_active(const Network& net, const std::vector<int>& gens, double P, VectorXd& p_g) {
  if (gens.size() == 1) {
    const auto& g = net.generators[gens[0]];
    p_g[g.index] = std::clamp(P, g.p_min, g.p_max);
    return;
  }
  auto output = [&](const Generator& g, double lam) {
    if (g.alpha > 0.0) return std::clamp((lam - g.beta) / (2.0 * g.alpha), g.p_min, g.p_max);
    return lam < g.beta ? g.p_min : g.p_max;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int k : gens) {
    const auto& g = net.generators[k];
    lo = std::min(lo, 2.0 * g.alpha * g.p_min + g.beta - 1.0);
    hi = std::max(hi, 2.0 * g.alpha * g.p_max + g.beta + 1.0);
  }
  auto total = [&](double lam) {
    double s = 0.0;
    for (int k : gens) s += output(net.generators[k], lam);
    return s;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < P ? lo : hi) = mid;
  }
  const double s_lo = total(lo);
  const double s_hi = total(hi);
  const double t = s_hi > s_lo ? std::clamp((P - s_lo) / (s_hi - s_lo), 0.0, 1.0) : 0.0;
  for (int k : gens) {
    const auto& g = net.generators[k];
    p_g[k] = output(g, lo) + t * (output(g, hi) - output(g, lo));
  }
}

/// Any split of Q within the reactive limits, proportional to the ranges.
void dispatch_reactive(const Network& net, const std::vector<int>& gens, double Q, VectorXd& q_g) {
  double qmin = 0.0;
  double qmax = 0.0;
  for (int k : gens) {
    qmin += net.generators[k].q_min;
    qmax += net.generators[k].q_max;
  }
  const double t = qmax > qmin ? std::clamp((Q - qmin) / (qmax - qmin), 0.0, 1.0) : 0.0;
  for (int k : gens) {
    const auto& g = net.generators[k];
    q_g[k] = g.q_min + t * (g.q_max - g.q_min);
  }
}

class BruteForce {
 public:
  BruteForce(const Network& net, const GridSearchSpec& spec)
      : net_(net), spec_(spec), inc_(bus_incidence(net)) {
    const int ref = net.reference_bus;
    for (const auto& b : net.buses) {
      const auto& gens = inc_.generators[b.index];
      if (gens.empty() && b.index != ref) {
        unknowns_.push_back({b.index, false});
        unknowns_.push_back({b.index, true});
        equations_.push_back({b.index, false});
        equations_.push_back({b.index, true});
        continue;
      }
      Coord v{b.index, false, b.v_min, b.v_max, b.v_min, b.v_max, spec.v_steps};
      if (!spec.v_range.empty()) std::tie(v.lo, v.hi) = spec.v_range[b.index];
      coords_.push_back(v);
      if (b.index == ref) continue;
      double pmin = 0.0, pmax = 0.0;
      for (int k : gens) {
        pmin += net.generators[k].p_min;
        pmax += net.generators[k].p_max;
      }
      coords_.push_back({b.index, true, pmin, pmax, pmin, pmax, spec.p_steps});
      unknowns_.push_back({b.index, true});
      equations_.push_back({b.index, false});
    }
    for (auto& c : coords_) {
      if (c.hi <= c.lo) c.steps = 1;
    }
  }

  OracleResult run() {
    OracleResult best;
    bool found = false;
    long evaluated = 0, feasible = 0;
    std::vector<double> pitch0;
    for (const auto& c : coords_) pitch0.push_back(c.steps > 1 ? c.pitch() : 0.0);
    double tol = spec_.tolerance;
    std::vector<double> incumbent(coords_.size());

    for (int round = 0; round <= spec_.refinement_rounds; ++round) {
      std::vector<Coord> saved = coords_;
      if (round > 0) {
        double scale = 0.0;
        for (size_t i = 0; i < coords_.size(); ++i) {
          auto& c = coords_[i];
          if (c.steps <= 1) continue;
          const double p = c.pitch();
          c.lo = std::max(c.bound_lo, incumbent[i] - 2.0 * p);
          c.hi = std::min(c.bound_hi, incumbent[i] + 2.0 * p);
          if (pitch0[i] > 0.0) scale = std::max(scale, c.pitch() / pitch0[i]);
        }
        tol = spec_.tolerance * scale;
      }
      // Each round replaces the incumbent with its own best, since its
      // tolerance is tighter than that of the rounds before.
      OracleResult round_best;
      std::vector<double> round_values;
      bool round_found = false;
      std::vector<int> idx(coords_.size(), 0);
      std::vector<double> values(coords_.size());
      for (;;) {
        for (size_t i = 0; i < coords_.size(); ++i) {
          values[i] = coords_[i].steps > 1 ? coords_[i].at(idx[i]) : coords_[i].lo;
        }
        ++evaluated;
        OracleResult cand;
        if (evaluate(values, tol, cand)) {
          ++feasible;
          if (!round_found || cand.objective < round_best.objective) {
            round_best = std::move(cand);
            round_values = values;
            round_found = true;
          }
        }
        size_t i = 0;
        for (; i < coords_.size(); ++i) {
          if (++idx[i] < std::max(1, coords_[i].steps)) break;
          idx[i] = 0;
        }
        if (i == coords_.size()) break;
      }
      if (!round_found) {
        // Nothing in the shrunken box at the tighter tolerance; the incumbent stands.
        coords_ = std::move(saved);
        break;
      }
      best = std::move(round_best);
      incumbent = round_values;
      found = true;
    }
    if (!found) {
      throw Error(ErrorCode::NoFeasiblePoint, "grid search found no AC-feasible point");
    }
    polish(best, incumbent, tol, evaluated, feasible);
    best.evaluated = evaluated;
    best.feasible = feasible;
    best.residuals = eval_oacopf_residuals(net_, best.point);
    return best;
  }

 private:
  /// Pattern search from the grid incumbent at the final tolerance. The grid
  /// alone can settle on the wrong end of a nearly flat direction (voltage
  /// level versus losses) because its pitch in P dominates the cost there.
  /// Directions are the coordinate axes and pairwise voltage moves; voltage
  /// moves are also tried with another bus's output re-solved to hold the
  /// reference injection, for optima where the reference unit sits at a limit.
  void polish(OracleResult& best, std::vector<double>& values, double tol, long& evaluated,
              long& feasible) const {
    const size_t k = coords_.size();
    std::vector<double> step(k, 0.0);
    for (size_t i = 0; i < k; ++i) {
      if (coords_[i].steps > 1) step[i] = coords_[i].pitch();
    }
    std::vector<std::vector<double>> dirs;
    for (size_t i = 0; i < k; ++i) {
      if (step[i] == 0.0) continue;
      for (double d : {1.0, -1.0}) {
        dirs.emplace_back(k, 0.0);
        dirs.back()[i] = d;
      }
      if (coords_[i].power) continue;
      for (size_t j = i + 1; j < k; ++j) {
        if (step[j] == 0.0 || coords_[j].power) continue;
        for (double di : {1.0, -1.0}) {
          for (double dj : {1.0, -1.0}) {
            dirs.emplace_back(k, 0.0);
            dirs.back()[i] = di;
            dirs.back()[j] = dj;
          }
        }
      }
    }
    std::vector<size_t> outputs;
    for (size_t j = 0; j < k; ++j) {
      if (coords_[j].power && step[j] > 0.0) outputs.push_back(j);
    }

    int budget = kPolishEvaluations;
    auto attempt = [&](const std::vector<double>& trial) {
      --budget;
      ++evaluated;
      OracleResult cand;
      if (!evaluate(trial, tol, cand)) return false;
      ++feasible;
      if (!(cand.objective < best.objective - 1e-13)) return false;
      best = std::move(cand);
      values = trial;
      return true;
    };
    while (budget > 0) {
      double largest = 0.0;
      for (size_t i = 0; i < k; ++i) {
        if (step[i] > 0.0) largest = std::max(largest, step[i] / std::max(1.0, coords_[i].bound_hi - coords_[i].bound_lo));
      }
      if (largest <= 1e-10) break;
      bool moved = false;
      const std::vector<double>* taken = nullptr;
      for (const auto& d : dirs) {
        std::vector<double> trial = values;
        bool changed = false;
        bool voltage_only = true;
        for (size_t i = 0; i < k; ++i) {
          if (d[i] == 0.0) continue;
          trial[i] = std::clamp(values[i] + d[i] * step[i], coords_[i].bound_lo, coords_[i].bound_hi);
          changed |= trial[i] != values[i];
          voltage_only &= !coords_[i].power;
        }
        if (!changed) continue;
        if (attempt(trial)) {
          moved = true;
          taken = &d;
          break;
        }
        if (!voltage_only || outputs.empty()) continue;
        double held = 0.0;
        if (!reference_injection(values, held)) continue;
        for (size_t j : outputs) {
          std::vector<double> held_trial = trial;
          if (hold_reference(held_trial, j, held) && attempt(held_trial)) {
            moved = true;
            taken = &d;
            break;
          }
        }
        if (moved) break;
      }
      if (!moved) {
        for (double& h : step) h *= 0.5;
      } else {
        // Expand along a successful direction so long flat valleys are crossed quickly.
        for (size_t i = 0; i < k; ++i) {
          if ((*taken)[i] != 0.0) {
            step[i] = std::min(2.0 * step[i], 0.25 * (coords_[i].bound_hi - coords_[i].bound_lo));
          }
        }
      }
    }
  }

  static constexpr int kPolishEvaluations = 4000;

  /// Active injection the reference bus must supply at these coordinates.
  bool reference_injection(const std::vector<double>& values, double& P_ref) const {
    AcPoint pt = AcPoint::zeros(net_);
    VectorXd target = VectorXd::Zero(static_cast<Eigen::Index>(net_.buses.size()));
    for (size_t i = 0; i < coords_.size(); ++i) {
      (coords_[i].power ? target : pt.v)[coords_[i].bus] = values[i];
    }
    if (!solve_unknowns(pt, target)) return false;
    VectorXd P, Q;
    required_injection(net_, pt, P, Q);
    P_ref = P[net_.reference_bus];
    return std::isfinite(P_ref);
  }

  /// Secant on coordinate j until the reference injection equals `held`.
  bool hold_reference(std::vector<double>& values, size_t j, double held) const {
    const auto& c = coords_[j];
    double x0 = values[j];
    double f0 = 0.0;
    if (!reference_injection(values, f0)) return false;
    f0 -= held;
    // Raising the output elsewhere lowers the reference injection about one for one.
    double x1 = std::clamp(x0 + f0, c.bound_lo, c.bound_hi);
    for (int k = 0; k < 20; ++k) {
      if (std::abs(f0) < 1e-13) break;
      values[j] = x1;
      double f1 = 0.0;
      if (!reference_injection(values, f1)) return false;
      f1 -= held;
      if (x1 == x0 || f1 == f0) {
        f0 = f1;
        break;
      }
      const double x2 = std::clamp(x1 - f1 * (x1 - x0) / (f1 - f0), c.bound_lo, c.bound_hi);
      x0 = x1;
      f0 = f1;
      x1 = x2;
    }
    values[j] = x0;
    return std::abs(f0) < 1e-10;
  }

  struct Unknown {
    int bus;
    bool theta;
  };
  struct Equation {
    int bus;
    bool reactive;
  };

  /// Newton's method on the balance equations; `target` is the enumerated
  /// active output per bus (zero at buses without generators).
  bool solve_unknowns(AcPoint& pt, const VectorXd& target) const {
    const auto k = static_cast<Eigen::Index>(unknowns_.size());
    for (const auto& u : unknowns_) {
      if (u.theta) {
        pt.theta_n[u.bus] = 0.0;
      } else {
        pt.v[u.bus] = 1.0;
      }
    }
    if (k == 0) {
      branch_flows(net_, pt);
      return true;
    }
    VectorXd P, Q;
    auto mismatch = [&](AcPoint& p) {
      branch_flows(net_, p);
      required_injection(net_, p, P, Q);
      VectorXd F(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        const auto& e = equations_[i];
        F[i] = e.reactive ? Q[e.bus] : P[e.bus] - target[e.bus];
      }
      return F;
    };
    VectorXd F = mismatch(pt);
    for (int it = 0; it < 40; ++it) {
      if (F.lpNorm<Eigen::Infinity>() <= 1e-12) return true;
      MatrixXd J(k, k);
      for (Eigen::Index j = 0; j < k; ++j) {
        AcPoint q = pt;
        double& var = unknowns_[j].theta ? q.theta_n[unknowns_[j].bus] : q.v[unknowns_[j].bus];
        const double h = 1e-7 * std::max(1.0, std::abs(var));
        var += h;
        J.col(j) = (mismatch(q) - F) / h;
      }
      const VectorXd step = J.fullPivLu().solve(-F);
      if (!step.allFinite()) return false;
      for (Eigen::Index j = 0; j < k; ++j) {
        const auto& u = unknowns_[j];
        (u.theta ? pt.theta_n : pt.v)[u.bus] += step[j];
        if (!u.theta && !(pt.v[u.bus] > 0.0)) return false;
      }
      F = mismatch(pt);
    }
    return F.lpNorm<Eigen::Infinity>() <= 1e-10;
  }

  bool evaluate(const std::vector<double>& values, double tol, OracleResult& out) const {
    AcPoint pt = AcPoint::zeros(net_);
    VectorXd target = VectorXd::Zero(static_cast<Eigen::Index>(net_.buses.size()));
    for (size_t i = 0; i < coords_.size(); ++i) {
      (coords_[i].power ? target : pt.v)[coords_[i].bus] = values[i];
    }
    if (!solve_unknowns(pt, target)) return false;

    for (const auto& b : net_.buses) {
      const int n = b.index;
      if (pt.v[n] < b.v_min - tol || pt.v[n] > b.v_max + tol) return false;
      if (pt.theta_n[n] < b.theta_min - tol || pt.theta_n[n] > b.theta_max + tol) return false;
    }
    for (const auto& br : net_.branches) {
      const int l = br.index;
      if (pt.theta_l[l] < br.theta_min - tol || pt.theta_l[l] > br.theta_max + tol) return false;
      if (br.rated()) {
        const double is = measurable_current_sq_sending(br, pt.p_s[l], pt.q_s[l], pt.V[br.from_bus]);
        const double ir = measurable_current_sq_receiving(br, pt.p_s[l], pt.q_s[l], pt.p_o[l],
                                                          pt.q_o[l], pt.V[br.to_bus]);
        if (is > br.K_tilde + tol || ir > br.K_tilde + tol) return false;
      }
    }

    VectorXd P, Q;
    required_injection(net_, pt, P, Q);
    for (const auto& b : net_.buses) {
      const auto& gens = inc_.generators[b.index];
      if (gens.empty()) {
        if (std::abs(P[b.index]) > tol || std::abs(Q[b.index]) > tol) return false;
        continue;
      }
      double pmin = 0.0, pmax = 0.0, qmin = 0.0, qmax = 0.0;
      for (int k : gens) {
        pmin += net_.generators[k].p_min;
        pmax += net_.generators[k].p_max;
        qmin += net_.generators[k].q_min;
        qmax += net_.generators[k].q_max;
      }
      if (P[b.index] < pmin - tol || P[b.index] > pmax + tol) return false;
      if (Q[b.index] < qmin - tol || Q[b.index] > qmax + tol) return false;
      dispatch_active(net_, gens, P[b.index], pt.p_g);
      dispatch_reactive(net_, gens, Q[b.index], pt.q_g);
    }
    out.objective = generation_cost(net_, pt.p_g);
    out.point = std::move(pt);
    return true;
  }

  const Network& net_;
  const GridSearchSpec& spec_;
  BusIncidence inc_;
  std::vector<Unknown> unknowns_;
  std::vector<Equation> equations_;
  std::vector<Coord> coords_;
};

// ---------------------------------------------------------------------------
// Dense barrier method

struct ConeLayout {
  int nonneg = 0;
  std::vector<std::pair<int, bool>> blocks;  // dim, rotated
};

/// Smallest eigenvalue of s w.r.t. the cone, -inf if not finite.
double cone_margin(const ConeLayout& cones, const VectorXd& s) {
  double m = std::numeric_limits<double>::infinity();
  int off = 0;
  for (; off < cones.nonneg; ++off) m = std::min(m, s[off]);
  for (const auto& [dim, rotated] : cones.blocks) {
    double t = s[off];
    double r2 = s.segment(off + 1, dim - 1).squaredNorm();
    if (rotated) {
      const double a = kInvSqrt2 * (s[off] + s[off + 1]);
      const double b = kInvSqrt2 * (s[off] - s[off + 1]);
      t = a;
      r2 = b * b + s.segment(off + 2, dim - 2).squaredNorm();
    }
    m = std::min(m, t - std::sqrt(r2));
    off += dim;
  }
  return std::isfinite(m) ? m : -std::numeric_limits<double>::infinity();
}

/// Barrier value, gradient and Hessian in slack space. Returns +inf outside.
double barrier(const ConeLayout& cones, const VectorXd& s, VectorXd& g, MatrixXd& H) {
  const auto m = s.size();
  g.setZero(m);
  H.setZero(m, m);
  double f = 0.0;
  int off = 0;
  for (; off < cones.nonneg; ++off) {
    if (!(s[off] > 0.0)) return std::numeric_limits<double>::infinity();
    f -= std::log(s[off]);
    g[off] = -1.0 / s[off];
    H(off, off) = 1.0 / (s[off] * s[off]);
  }
  for (const auto& [dim, rotated] : cones.blocks) {
    const VectorXd x = s.segment(off, dim);
    // d = x'Mx with M the cone's quadratic form; grad d = 2Mx, hess d = 2M.
    MatrixXd M = MatrixXd::Zero(dim, dim);
    if (rotated) {
      M(0, 1) = M(1, 0) = 1.0;
      for (int i = 2; i < dim; ++i) M(i, i) = -1.0;
    } else {
      M(0, 0) = 1.0;
      for (int i = 1; i < dim; ++i) M(i, i) = -1.0;
    }
    const VectorXd Mx = M * x;
    const double d = x.dot(Mx);
    const bool inside = rotated ? (x[0] > 0.0 && x[1] > 0.0 && d > 0.0) : (x[0] > 0.0 && d > 0.0);
    if (!inside) return std::numeric_limits<double>::infinity();
    f -= std::log(d);
    g.segment(off, dim) = -2.0 * Mx / d;
    H.block(off, off, dim, dim) = -2.0 * M / d + 4.0 * Mx * Mx.transpose() / (d * d);
    off += dim;
  }
  return f;
}

/// min t (0.5 y'Qy + c'y) - sum log(slack(h - G y)) subject to C y = d, for an
/// increasing t, starting from a strictly feasible y. `stop` ends early.
struct BarrierProblem {
  MatrixXd Q;
  VectorXd c;
  MatrixXd G;
  VectorXd h;
  MatrixXd C;
  VectorXd d;
  ConeLayout cones;
  double degree = 0.0;
};

bool barrier_method(const BarrierProblem& bp, VectorXd& y, int& newton_steps,
                    const std::function<bool(const VectorXd&)>& stop, double gap_tol) {
  // Equalities are handled by working in the null space of C (y stays on
  // C y = d since the start is feasible); this avoids pivoting trouble between
  // barrier curvature and constraint rows at large t.
  MatrixXd Z;
  if (bp.C.rows() > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(bp.C, Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    const auto rank = svd.rank();
    Z = svd.matrixV().rightCols(y.size() - rank);
  } else {
    Z = MatrixXd::Identity(y.size(), y.size());
  }
  auto objective = [&](const VectorXd& v) { return 0.5 * v.dot(bp.Q * v) + bp.c.dot(v); };
  double t = 1.0;
  VectorXd gs;
  MatrixXd Hs;
  for (int outer = 0; outer < 60; ++outer) {
    for (int inner = 0; inner < 200; ++inner) {
      const VectorXd s = bp.h - bp.G * y;
      const double phi = barrier(bp.cones, s, gs, Hs);
      if (!std::isfinite(phi)) return false;
      const VectorXd grad = t * (bp.Q * y + bp.c) - bp.G.transpose() * gs;
      const MatrixXd GZ = bp.G * Z;
      MatrixXd H = t * Z.transpose() * bp.Q * Z + GZ.transpose() * Hs * GZ;
      if (H.size() == 0) return true;
      H.diagonal().array() += 1e-13 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      const VectorXd gz = Z.transpose() * grad;
      const VectorXd dw = H.ldlt().solve(-gz);
      const VectorXd dy = Z * dw;
      if (!dy.allFinite()) return false;
      const double decrement = dw.dot(H * dw);
      // Backtracking line search on t f + phi, staying strictly inside.
      const double f0 = t * objective(y) + phi;
      double a = 1.0;
      VectorXd trial;
      for (int ls = 0; ls < 80; ++ls, a *= 0.5) {
        trial = y + a * dy;
        VectorXd g2;
        MatrixXd H2;
        const double phi2 = barrier(bp.cones, bp.h - bp.G * trial, g2, H2);
        if (std::isfinite(phi2) && t * objective(trial) + phi2 <= f0 + 0.25 * a * grad.dot(dy) + 1e-14 * std::abs(f0)) break;
      }
      y = trial;
      ++newton_steps;
      if (stop && stop(y)) return true;
      if (decrement < 1e-12 || a < 1e-12) break;
    }
    if (bp.degree / t < gap_tol) return true;
    t *= 8.0;
  }
  return bp.degree / t < gap_tol * 100.0;
}

}  // namespace

// ---------------------------------------------------------------------------

void GridSearchSpec::validate(const Network& net) const {
  if (v_steps < 3 || p_steps < 3) throw Error(ErrorCode::InvalidArgument, "grid steps must be >= 3");
  if (refinement_rounds < 0 || !(tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "refinement_rounds >= 0 and tolerance > 0 required");
  }
  if (!v_range.empty() && v_range.size() != net.buses.size()) {
    throw Error(ErrorCode::InvalidArgument, "v ranges must have one entry per bus");
  }
  for (const auto& b : net.buses) {
    if (v_range.empty()) continue;
    const auto [lo, hi] = v_range[b.index];
    if (lo > hi || lo < b.v_min || hi > b.v_max) {
      throw Error(ErrorCode::InvalidArgument, "v range of bus " + std::to_string(b.id) + " outside bounds");
    }
  }
}

OracleResult brute_force_acopf(const Network& net, const GridSearchSpec& spec) {
  if (net.buses.size() > 3) throw Error(ErrorCode::InvalidArgument, "oracle supports at most 3 buses");
  if (net.buses.empty()) throw Error(ErrorCode::EmptyNetwork, "network has no buses");
  spec.validate(net);
  for (const auto& br : net.branches) {
    if (!std::isfinite(br.R) || !std::isfinite(br.X) || !std::isfinite(br.B_s) || !std::isfinite(br.B_r)) {
      throw Error(ErrorCode::InvalidArgument, "oracle requires finite branch parameters");
    }
  }
  return BruteForce(net, spec).run();
}

Network random_tiny_network(std::uint64_t seed, const TinyNetworkOptions& options) {
  if (options.buses < 2 || options.buses > 3) {
    throw Error(ErrorCode::InvalidArgument, "tiny networks have 2 or 3 buses");
  }
  std::mt19937_64 rng(seed);
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  Network net;
  net.base_mva = 100.0;
  for (int i = 0; i < options.buses; ++i) {
    Bus b;
    b.index = i;
    b.id = i + 1;
    b.v_min = 0.9;
    b.v_max = 1.1;
    if (i > 0) {
      // Kept below the 0.5 pu cap so a 3-bus path stays inside the voltage band.
      b.p_d = U(0.05, 0.3);
      b.q_d = U(0.0, 0.1);
    } else {
      b.theta_min = 0.0;
      b.theta_max = 0.0;
    }
    net.buses.push_back(b);
  }
  auto add_branch = [&](int from, int to) {
    Branch br;
    br.index = static_cast<int>(net.branches.size());
    br.from_bus = from;
    br.to_bus = to;
    br.R = U(0.001, 0.1);
    br.X = U(0.01, 0.3);
    const double b = U(0.0, 0.04);
    br.B_s = b / 2.0;
    br.B_r = b / 2.0;
    if (U(0.0, 1.0) < 0.5) {
      const double rate = U(1.0, 3.0);
      br.K_tilde = rate * rate;
    }
    net.branches.push_back(br);
  };
  add_branch(0, 1);
  if (options.buses == 3) {
    add_branch(1, 2);
    if (options.meshed) add_branch(0, 2);
  }
  Generator g0;
  g0.index = 0;
  g0.bus = 0;
  g0.p_max = 3.0;
  g0.q_min = -2.0;
  g0.q_max = 2.0;
  g0.alpha = U(0.5, 2.0);
  g0.beta = U(1.0, 10.0);
  g0.gamma = U(0.0, 1.0);
  net.generators.push_back(g0);
  if (options.second_generator) {
    Generator g1;
    g1.index = 1;
    g1.bus = options.buses - 1;
    g1.p_max = U(0.2, 1.0);
    g1.q_min = -0.5;
    g1.q_max = 0.5;
    g1.alpha = U(0.5, 2.0);
    g1.beta = U(1.0, 10.0);
    g1.gamma = U(0.0, 1.0);
    net.generators.push_back(g1);
  }
  net.reference_bus = 0;
  rebuild_incidence(net);
  return net;
}

RandomSocp random_socp(std::uint64_t seed, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "random SOCP needs n >= 1");
  std::mt19937_64 rng(seed);
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto I = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::normal_distribution<double> normal(0.0, 1.0);

  RandomSocp out;
  auto& f = out.form;
  f.n = n;
  f.zero = I(0, std::min(3, n / 2));
  f.nonneg = I(1, n);
  const int socs = I(0, 2);
  const int rsocs = I(0, 2);
  for (int i = 0; i < socs; ++i) f.soc.push_back(I(2, 4));
  for (int i = 0; i < rsocs; ++i) f.rsoc.push_back(I(3, 4));
  f.m = f.zero + f.nonneg;
  for (int d : f.soc) f.m += d;
  for (int d : f.rsoc) f.m += d;

  MatrixXd A = MatrixXd::Zero(f.m, n);
  for (int i = 0; i < f.m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (U(0.0, 1.0) < 0.6) A(i, j) = normal(rng);
    }
    A(i, I(0, n - 1)) += 1.0;  // no empty rows
  }
  // Interior points of K (for s) and of K* = K (for z), zero rows aside.
  auto interior = [&](VectorXd& v, bool dual) {
    v.resize(f.m);
    int off = 0;
    for (; off < f.zero; ++off) v[off] = dual ? normal(rng) : 0.0;
    for (int i = 0; i < f.nonneg; ++i, ++off) v[off] = U(0.5, 2.0);
    for (int d : f.soc) {
      double r = 0.0;
      for (int i = 1; i < d; ++i) {
        v[off + i] = normal(rng);
        r += v[off + i] * v[off + i];
      }
      v[off] = std::sqrt(r) + U(0.5, 1.5);
      off += d;
    }
    for (int d : f.rsoc) {
      double r = 0.0;
      for (int i = 2; i < d; ++i) {
        v[off + i] = normal(rng);
        r += v[off + i] * v[off + i];
      }
      v[off] = U(0.5, 1.5);
      v[off + 1] = r / (2.0 * v[off]) + U(0.5, 1.5);
      off += d;
    }
  };
  VectorXd s0, z0;
  interior(s0, false);
  interior(z0, true);
  out.x0.resize(n);
  VectorXd y(n);
  for (int j = 0; j < n; ++j) {
    out.x0[j] = normal(rng);
    y[j] = normal(rng);
  }
  VectorXd pdiag(n);
  for (int j = 0; j < n; ++j) pdiag[j] = U(0.0, 1.0) < 0.5 ? 0.0 : U(0.0, 2.0);

  f.b = A * out.x0 + s0;
  f.q = -pdiag.cwiseProduct(y) - A.transpose() * z0;
  f.c0 = U(-1.0, 1.0);
  f.A = A.sparseView();
  f.P.resize(n, n);
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < n; ++j) {
    if (pdiag[j] != 0.0) t.emplace_back(j, j, pdiag[j]);
  }
  f.P.setFromTriplets(t.begin(), t.end());
  f.A.makeCompressed();
  f.P.makeCompressed();
  return out;
}

BarrierResult barrier_reference_solve(const StandardForm& f) {
  BarrierResult out;
  const int n = f.n;
  const int me = f.zero;
  const int mi = f.m - f.zero;
  const MatrixXd A = MatrixXd(f.A);
  MatrixXd P = MatrixXd(f.P);
  P = P.triangularView<Eigen::Upper>();
  MatrixXd Pfull = P + P.transpose();
  Pfull.diagonal() -= P.diagonal();

  ConeLayout cones;
  cones.nonneg = f.nonneg;
  double degree = f.nonneg;
  for (int d : f.soc) {
    cones.blocks.emplace_back(d, false);
    degree += 2.0;
  }
  for (int d : f.rsoc) {
    cones.blocks.emplace_back(d, true);
    degree += 2.0;
  }
  const MatrixXd AE = A.topRows(me);
  const VectorXd bE = f.b.head(me);
  const MatrixXd AI = A.bottomRows(mi);
  const VectorXd bI = f.b.tail(mi);

  // Starting x: least-norm solution of the equalities.
  VectorXd x = me > 0 ? VectorXd(AE.completeOrthogonalDecomposition().solve(bE)) : VectorXd::Zero(n);
  if (me > 0 && (AE * x - bE).lpNorm<Eigen::Infinity>() > 1e-8 * (1.0 + bE.lpNorm<Eigen::Infinity>())) {
    return out;  // inconsistent equalities
  }

  // Identity direction of the inequality cones in slack space.
  VectorXd e = VectorXd::Zero(mi);
  {
    int off = 0;
    for (; off < f.nonneg; ++off) e[off] = 1.0;
    for (const auto& [dim, rotated] : cones.blocks) {
      if (rotated) {
        e[off] = kInvSqrt2;
        e[off + 1] = kInvSqrt2;
      } else {
        e[off] = 1.0;
      }
      off += dim;
    }
  }

  if (mi > 0) {
    const VectorXd s = bI - AI * x;
    const double margin = cone_margin(cones, s);
    if (!(margin > 1e-6)) {
      // Phase I over (x, r): min r  s.t.  b - A x + r e in K,  r >= -1. A small
      // proximal term keeps x bounded when the feasible set has recession directions.
      constexpr double kProx = 1e-3;
      BarrierProblem ph;
      ph.Q = MatrixXd::Zero(n + 1, n + 1);
      ph.Q.topLeftCorner(n, n).diagonal().setConstant(kProx);
      ph.c = VectorXd::Zero(n + 1);
      ph.c.head(n) = -kProx * x;
      ph.c[n] = 1.0;
      ph.G = MatrixXd::Zero(mi + 1, n + 1);
      ph.h = VectorXd::Zero(mi + 1);
      // The extra nonneg row r + 1 >= 0 goes first to keep the nonneg block contiguous.
      ph.G(0, n) = -1.0;
      ph.h[0] = 1.0;
      ph.G.bottomLeftCorner(mi, n) = AI;
      ph.G.bottomRightCorner(mi, 1) = -e;
      ph.h.tail(mi) = bI;
      ph.C = MatrixXd::Zero(me, n + 1);
      ph.C.leftCols(n) = AE;
      ph.d = bE;
      ph.cones = cones;
      ph.cones.nonneg += 1;
      ph.degree = degree + 1.0;
      VectorXd y(n + 1);
      y.head(n) = x;
      y[n] = std::max(0.0, -margin) + 1.0;
      const bool ok = barrier_method(ph, y, out.newton_steps,
                                     [&](const VectorXd& v) { return v[n] < -1e-3; }, 1e-9);
      if (!ok || !(y[n] < 0.0)) return out;
      x = y.head(n);
    }
  }

  BarrierProblem bp;
  bp.Q = Pfull;
  bp.c = f.q;
  bp.G = AI;
  bp.h = bI;
  bp.C = AE;
  bp.d = bE;
  bp.cones = cones;
  bp.degree = degree;
  out.converged = barrier_method(bp, x, out.newton_steps, nullptr, 1e-11);
  out.x = x;
  out.objective = 0.5 * x.dot(Pfull * x) + f.q.dot(x) + f.c0;
  return out;
}

BarrierResult barrier_reference_solve(std::string_view dump) {
  return barrier_reference_solve(parse_standard_form(dump));
}

}  // namespace socopf
