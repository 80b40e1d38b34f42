#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace socopf {

/// Sparse LDL' factorization of a symmetric quasi-definite matrix with
/// AMD fill-reducing ordering and sign-aware dynamic regularization.
///
/// The sparsity pattern is fixed by analyze(); factor() may be called any
/// number of times with new values on that pattern.
class SparseLdl {
 public:
  struct Options {
    double dynamic_eps = 1e-13;
    double dynamic_delta = 2e-7;
  };

  SparseLdl() = default;
  explicit SparseLdl(Options options) : options_(options) {}

  /// `upper` holds the upper triangle (diagonal included) in column-major order.
  /// `signs[i]` is +1 or -1, the expected sign of pivot i.
  void analyze(const Eigen::SparseMatrix<double>& upper, std::vector<int> signs);

  /// Returns the number of pivots that were replaced by dynamic regularization,
  /// or -1 if a pivot came out non-finite.
  int factor(const Eigen::SparseMatrix<double>& upper);

  /// Solves in place with the factored (regularized) matrix.
  void solve(Eigen::VectorXd& x) const;

  int size() const { return n_; }
  long factor_nonzeros() const { return static_cast<long>(Li_.size()); }

 private:
  Options options_;
  int n_ = 0;
  std::vector<int> perm_;   // perm_[new] = old
  std::vector<int> iperm_;  // iperm_[old] = new
  std::vector<int> signs_;  // in permuted order
  // Permuted upper triangle, CSC.
  std::vector<int> Cp_;
  std::vector<int> Ci_;
  std::vector<double> Cx_;
  // Position in Cx_ for each stored entry of the input, in input storage order.
  std::vector<int> value_map_;
  long input_nnz_ = 0;
  // Factor.
  std::vector<int> parent_;
  std::vector<int> Lp_;
  std::vector<int> Lnz_;
  std::vector<int> Li_;
  std::vector<double> Lx_;
  std::vector<double> D_;
  // Workspace.
  std::vector<double> Y_;
  std::vector<int> pattern_;
  std::vector<int> flag_;
};

}  // namespace socopf
