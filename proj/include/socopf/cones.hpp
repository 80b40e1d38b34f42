#pragma once

#include <vector>

#include <Eigen/Dense>

#include "socopf/conic_program.hpp"

namespace socopf {

/// Product cone of a StandardForm with Nesterov-Todd scaling.
///
/// Slack-space vectors (s, z and their steps) use the row layout of the
/// StandardForm. Scaled-space vectors (lambda and complementarity targets) use
/// the same layout, except that rotated blocks are expressed in the
/// equivalent second-order-cone coordinates ((u+v)/sqrt2, (u-v)/sqrt2, w).
class ConeProduct {
 public:
  struct Block {
    int offset = 0;
    int dim = 0;
    bool rotated = false;
  };

  explicit ConeProduct(const StandardForm& form);

  int dim() const { return dim_; }
  int zero() const { return zero_; }
  int nonneg() const { return nonneg_; }
  /// Barrier degree: nonneg entries plus one per conic block.
  int degree() const { return nonneg_ + static_cast<int>(blocks_.size()); }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// Smallest "eigenvalue" of v per cone, minimized over the product (zero rows ignored).
  double min_eigenvalue(const Eigen::VectorXd& v) const;
  /// v += a * e in slack space (zero rows untouched).
  void add_identity(Eigen::VectorXd& v, double a) const;
  /// v += a * e in scaled space.
  void add_scaled_identity(Eigen::VectorXd& v, double a) const;
  /// Largest alpha in [0, alpha_max] with v + alpha dv inside the cone.
  double step_length(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double alpha_max) const;

  /// Computes W with W z = W^-T s = lambda. Returns false if s or z is not interior.
  bool update_scaling(const Eigen::VectorXd& s, const Eigen::VectorXd& z);
  const Eigen::VectorXd& lambda() const { return lambda_; }

  /// W entry of a nonneg row.
  double nonneg_scale(int row) const { return nn_w_[row - zero_]; }
  /// Dense W^-T of a conic block in slack coordinates (maps s-space to scaled space).
  Eigen::MatrixXd winv_t_block(int block) const;
  /// out = H v in slack space.
  void mul_hessian(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;

  /// scaled = W v for a z-space vector.
  void mul_w(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
  /// scaled = W^-T v for an s-space vector.
  void mul_winv_t(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
  /// s-space = W^T v for a scaled-space vector.
  void mul_w_t(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;

  /// Jordan product in scaled space.
  void circ(const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
  /// out = lambda \ d (inverse Jordan product) in scaled space.
  void lambda_solve(const Eigen::VectorXd& d, Eigen::VectorXd& out) const;

  /// Largest violation of membership of v in K (or in the dual cone K*, where
  /// zero rows are free), 0 if inside.
  double violation(const Eigen::VectorXd& v, bool dual = false) const;

 private:
  int dim_ = 0;
  int zero_ = 0;
  int nonneg_ = 0;
  std::vector<Block> blocks_;

  Eigen::VectorXd lambda_;
  Eigen::VectorXd nn_w_;  // sqrt(s/z) on nonneg rows
  struct Scaling {
    double eta = 1.0;
    Eigen::VectorXd w;  // normalized NT point in SOC coordinates
  };
  std::vector<Scaling> scaling_;
};

}  // namespace socopf
