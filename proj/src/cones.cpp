#include "socopf/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace socopf {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

using Seg = Eigen::Ref<const Eigen::VectorXd>;

/// Rotated (u, v, w) <-> second-order (t, x, w); the map is its own inverse.
Eigen::VectorXd rotate(const Seg& v) {
  Eigen::VectorXd out = v;
  out[0] = kInvSqrt2 * (v[0] + v[1]);
  out[1] = kInvSqrt2 * (v[0] - v[1]);
  return out;
}

Eigen::VectorXd to_soc(const Seg& v, bool rotated) {
  return rotated ? rotate(v) : Eigen::VectorXd(v);
}

double soc_residual(const Seg& v) { return v[0] - v.tail(v.size() - 1).norm(); }

/// sqrt(v0^2 - |v1|^2) computed as sqrt((v0-|v1|)(v0+|v1|)).
double soc_scale(const Seg& v) {
  const double r = v.tail(v.size() - 1).norm();
  return std::sqrt(std::max(0.0, (v[0] - r) * (v[0] + r)));
}

/// Largest alpha with u + alpha d in the second-order cone, given u interior.
double soc_step(const Seg& u, const Seg& d) {
  const auto k = u.size() - 1;
  const double a = d[0] * d[0] - d.tail(k).squaredNorm();
  const double b = 2.0 * (u[0] * d[0] - u.tail(k).dot(d.tail(k)));
  const double c = std::max(0.0, u[0] * u[0] - u.tail(k).squaredNorm());
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (a >= 0.0 && b >= 0.0) return inf;
  if (a == 0.0) return b < 0.0 ? -c / b : inf;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return inf;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double best = inf;
  for (double r : {q / a, q != 0.0 ? c / q : inf}) {
    if (r >= 0.0) best = std::min(best, r);
  }
  return best;
}

/// W v with W = eta [w0 w1'; w1 I + w1 w1'/(1+w0)]; inverse flips the w1 signs.
Eigen::VectorXd nt_apply(double eta, const Eigen::VectorXd& w, const Eigen::VectorXd& v,
                         bool inverse) {
  const auto k = w.size() - 1;
  const double w0 = w[0];
  const double sign = inverse ? -1.0 : 1.0;
  const double dot = w.tail(k).dot(v.tail(k));
  Eigen::VectorXd out(w.size());
  out[0] = w0 * v[0] + sign * dot;
  out.tail(k) = v.tail(k) + (dot / (1.0 + w0) + sign * v[0]) * w.tail(k);
  return inverse ? Eigen::VectorXd(out / eta) : Eigen::VectorXd(out * eta);
}

}  // namespace

ConeProduct::ConeProduct(const StandardForm& form)
    : dim_(form.m), zero_(form.zero), nonneg_(form.nonneg) {
  int offset = form.zero + form.nonneg;
  for (int d : form.soc) {
    blocks_.push_back({offset, d, false});
    offset += d;
  }
  for (int d : form.rsoc) {
    blocks_.push_back({offset, d, true});
    offset += d;
  }
  lambda_ = Eigen::VectorXd::Zero(dim_);
  nn_w_ = Eigen::VectorXd::Ones(nonneg_);
  scaling_.resize(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) {
    scaling_[b].w = Eigen::VectorXd::Zero(blocks_[b].dim);
    scaling_[b].w[0] = 1.0;
  }
}

double ConeProduct::min_eigenvalue(const Eigen::VectorXd& v) const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = zero_; i < zero_ + nonneg_; ++i) m = std::min(m, v[i]);
  for (const auto& blk : blocks_) {
    m = std::min(m, soc_residual(to_soc(v.segment(blk.offset, blk.dim), blk.rotated)));
  }
  return m;
}

void ConeProduct::add_identity(Eigen::VectorXd& v, double a) const {
  for (int i = zero_; i < zero_ + nonneg_; ++i) v[i] += a;
  for (const auto& blk : blocks_) {
    if (blk.rotated) {
      v[blk.offset] += a * kInvSqrt2;
      v[blk.offset + 1] += a * kInvSqrt2;
    } else {
      v[blk.offset] += a;
    }
  }
}

void ConeProduct::add_scaled_identity(Eigen::VectorXd& v, double a) const {
  for (int i = zero_; i < zero_ + nonneg_; ++i) v[i] += a;
  for (const auto& blk : blocks_) v[blk.offset] += a;
}

double ConeProduct::step_length(const Eigen::VectorXd& v, const Eigen::VectorXd& dv,
                                double alpha_max) const {
  double alpha = alpha_max;
  for (int i = zero_; i < zero_ + nonneg_; ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  for (const auto& blk : blocks_) {
    const Eigen::VectorXd u = to_soc(v.segment(blk.offset, blk.dim), blk.rotated);
    const Eigen::VectorXd d = to_soc(dv.segment(blk.offset, blk.dim), blk.rotated);
    alpha = std::min(alpha, soc_step(u, d));
  }
  return std::max(alpha, 0.0);
}

bool ConeProduct::update_scaling(const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
  lambda_.setZero();
  for (int k = 0; k < nonneg_; ++k) {
    const int i = zero_ + k;
    if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
    nn_w_[k] = std::sqrt(s[i] / z[i]);
    lambda_[i] = std::sqrt(s[i] * z[i]);
  }
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    const Eigen::VectorXd sv = to_soc(s.segment(blk.offset, blk.dim), blk.rotated);
    const Eigen::VectorXd zv = to_soc(z.segment(blk.offset, blk.dim), blk.rotated);
    const double s_scale = soc_scale(sv);
    const double z_scale = soc_scale(zv);
    if (!(s_scale > 0.0) || !(z_scale > 0.0) || sv[0] <= 0.0 || zv[0] <= 0.0) return false;
    const Eigen::VectorXd sb = sv / s_scale;
    const Eigen::VectorXd zb = zv / z_scale;
    const double gamma = std::sqrt(std::max(0.0, 0.5 * (1.0 + sb.dot(zb))));
    if (!(gamma > 0.0)) return false;
    Eigen::VectorXd w = sb;
    w[0] += zb[0];
    w.tail(blk.dim - 1) -= zb.tail(blk.dim - 1);
    w /= 2.0 * gamma;
    // Renormalize so that w'Jw = 1 exactly.
    const double r = w.tail(blk.dim - 1).norm();
    w[0] = std::sqrt(1.0 + r * r);
    scaling_[b].w = w;
    scaling_[b].eta = std::sqrt(s_scale / z_scale);
    lambda_.segment(blk.offset, blk.dim) = nt_apply(scaling_[b].eta, w, zv, false);
  }
  return true;
}

Eigen::MatrixXd ConeProduct::winv_t_block(int b) const {
  const auto& blk = blocks_[b];
  Eigen::MatrixXd M(blk.dim, blk.dim);
  for (int j = 0; j < blk.dim; ++j) {
    const Eigen::VectorXd e = to_soc(Eigen::VectorXd::Unit(blk.dim, j), blk.rotated);
    M.col(j) = nt_apply(scaling_[b].eta, scaling_[b].w, e, true);
  }
  return M;
}

void ConeProduct::mul_hessian(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  out.setZero(dim_);
  for (int k = 0; k < nonneg_; ++k) {
    const int i = zero_ + k;
    out[i] = nn_w_[k] * nn_w_[k] * v[i];
  }
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    const auto& sc = scaling_[b];
    const Eigen::VectorXd x = to_soc(v.segment(blk.offset, blk.dim), blk.rotated);
    // eta^2 (2 w w' - J) x
    Eigen::VectorXd y = 2.0 * sc.w.dot(x) * sc.w;
    y[0] -= x[0];
    y.tail(blk.dim - 1) += x.tail(blk.dim - 1);
    y *= sc.eta * sc.eta;
    out.segment(blk.offset, blk.dim) = to_soc(y, blk.rotated);
  }
}

void ConeProduct::mul_w(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  out.setZero(dim_);
  for (int k = 0; k < nonneg_; ++k) out[zero_ + k] = v[zero_ + k] * nn_w_[k];
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    const Eigen::VectorXd x = to_soc(v.segment(blk.offset, blk.dim), blk.rotated);
    out.segment(blk.offset, blk.dim) = nt_apply(scaling_[b].eta, scaling_[b].w, x, false);
  }
}

void ConeProduct::mul_winv_t(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  out.setZero(dim_);
  for (int k = 0; k < nonneg_; ++k) out[zero_ + k] = v[zero_ + k] / nn_w_[k];
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    const Eigen::VectorXd x = to_soc(v.segment(blk.offset, blk.dim), blk.rotated);
    out.segment(blk.offset, blk.dim) = nt_apply(scaling_[b].eta, scaling_[b].w, x, true);
  }
}

void ConeProduct::mul_w_t(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  out.setZero(dim_);
  for (int k = 0; k < nonneg_; ++k) out[zero_ + k] = v[zero_ + k] * nn_w_[k];
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    const Eigen::VectorXd y =
        nt_apply(scaling_[b].eta, scaling_[b].w, v.segment(blk.offset, blk.dim), false);
    out.segment(blk.offset, blk.dim) = to_soc(y, blk.rotated);
  }
}

void ConeProduct::circ(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                       Eigen::VectorXd& out) const {
  out.setZero(dim_);
  for (int i = zero_; i < zero_ + nonneg_; ++i) out[i] = u[i] * v[i];
  for (const auto& blk : blocks_) {
    const auto a = u.segment(blk.offset, blk.dim);
    const auto b = v.segment(blk.offset, blk.dim);
    const auto k = blk.dim - 1;
    out[blk.offset] = a.dot(b);
    out.segment(blk.offset + 1, k) = a[0] * b.tail(k) + b[0] * a.tail(k);
  }
}

void ConeProduct::lambda_solve(const Eigen::VectorXd& d, Eigen::VectorXd& out) const {
  out.setZero(dim_);
  for (int i = zero_; i < zero_ + nonneg_; ++i) out[i] = d[i] / lambda_[i];
  for (const auto& blk : blocks_) {
    const auto l = lambda_.segment(blk.offset, blk.dim);
    const auto dd = d.segment(blk.offset, blk.dim);
    const auto k = blk.dim - 1;
    const double det = l[0] * l[0] - l.tail(k).squaredNorm();
    const double x0 = (l[0] * dd[0] - l.tail(k).dot(dd.tail(k))) / det;
    out[blk.offset] = x0;
    out.segment(blk.offset + 1, k) = (dd.tail(k) - x0 * l.tail(k)) / l[0];
  }
}

double ConeProduct::violation(const Eigen::VectorXd& v, bool dual) const {
  double worst = 0.0;
  if (!dual) {
    for (int i = 0; i < zero_; ++i) worst = std::max(worst, std::abs(v[i]));
  }
  for (int i = zero_; i < zero_ + nonneg_; ++i) worst = std::max(worst, -v[i]);
  for (const auto& blk : blocks_) {
    worst = std::max(worst, -soc_residual(to_soc(v.segment(blk.offset, blk.dim), blk.rotated)));
  }
  return worst;
}

}  // namespace socopf
