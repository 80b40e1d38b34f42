#include "socopf/sparse_ldl.hpp"

#include <cmath>

#include <Eigen/OrderingMethods>

#include "socopf/errors.hpp"

namespace socopf {

void SparseLdl::analyze(const Eigen::SparseMatrix<double>& upper, std::vector<int> signs) {
  if (upper.rows() != upper.cols() || static_cast<size_t>(upper.rows()) != signs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "LDL: matrix and sign vector disagree");
  }
  n_ = static_cast<int>(upper.rows());
  const Eigen::SparseMatrix<double> compressed = upper;  // compressed copy, ColMajor

  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> ordering;
  Eigen::AMDOrdering<int> amd;
  Eigen::SparseMatrix<double> symmetric =
      compressed.selfadjointView<Eigen::Upper>();  // AMD wants the full pattern
  amd(symmetric, ordering);
  perm_.assign(ordering.indices().data(), ordering.indices().data() + n_);
  iperm_.assign(n_, 0);
  for (int k = 0; k < n_; ++k) iperm_[perm_[k]] = k;
  signs_.assign(n_, 1);
  for (int k = 0; k < n_; ++k) signs_[k] = signs[perm_[k]] >= 0 ? 1 : -1;

  // Permuted upper triangle.
  input_nnz_ = compressed.nonZeros();
  std::vector<int> col_count(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(compressed, j); it; ++it) {
      if (it.row() > j) throw Error(ErrorCode::DimensionMismatch, "LDL: entry below diagonal");
      const int a = iperm_[it.row()];
      const int b = iperm_[j];
      ++col_count[std::max(a, b) + 1];
    }
  }
  Cp_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) Cp_[j + 1] = Cp_[j] + col_count[j + 1];
  Ci_.assign(Cp_[n_], 0);
  Cx_.assign(Cp_[n_], 0.0);
  value_map_.assign(input_nnz_, 0);
  std::vector<int> next(Cp_.begin(), Cp_.end() - 1);
  long k = 0;
  for (int j = 0; j < n_; ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(compressed, j); it; ++it, ++k) {
      const int a = iperm_[it.row()];
      const int b = iperm_[j];
      const int col = std::max(a, b);
      const int pos = next[col]++;
      Ci_[pos] = std::min(a, b);
      value_map_[k] = pos;
    }
  }

  // Elimination tree and column counts.
  parent_.assign(n_, -1);
  Lnz_.assign(n_, 0);
  flag_.assign(n_, -1);
  for (int col = 0; col < n_; ++col) {
    flag_[col] = col;
    for (int p = Cp_[col]; p < Cp_[col + 1]; ++p) {
      int i = Ci_[p];
      if (i >= col) continue;
      for (; flag_[i] != col; i = parent_[i]) {
        if (parent_[i] == -1) parent_[i] = col;
        ++Lnz_[i];
        flag_[i] = col;
      }
    }
  }
  Lp_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) Lp_[j + 1] = Lp_[j] + Lnz_[j];
  Li_.assign(Lp_[n_], 0);
  Lx_.assign(Lp_[n_], 0.0);
  D_.assign(n_, 0.0);
  Y_.assign(n_, 0.0);
  pattern_.assign(n_, 0);
}

int SparseLdl::factor(const Eigen::SparseMatrix<double>& upper) {
  if (upper.nonZeros() != input_nnz_ || upper.rows() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "LDL: pattern changed since analyze()");
  }
  const Eigen::SparseMatrix<double> compressed = upper;
  const double* values = compressed.valuePtr();
  for (long k = 0; k < input_nnz_; ++k) Cx_[value_map_[k]] = values[k];

  int regularized = 0;
  for (int k = 0; k < n_; ++k) {
    Y_[k] = 0.0;
    int top = n_;
    flag_[k] = k;
    Lnz_[k] = 0;
    for (int p = Cp_[k]; p < Cp_[k + 1]; ++p) {
      int i = Ci_[p];
      Y_[i] += Cx_[p];
      int len = 0;
      for (; flag_[i] != k; i = parent_[i]) {
        pattern_[len++] = i;
        flag_[i] = k;
      }
      while (len > 0) pattern_[--top] = pattern_[--len];
    }
    D_[k] = Y_[k];
    Y_[k] = 0.0;
    for (; top < n_; ++top) {
      const int i = pattern_[top];
      const double yi = Y_[i];
      Y_[i] = 0.0;
      const int p2 = Lp_[i] + Lnz_[i];
      for (int p = Lp_[i]; p < p2; ++p) Y_[Li_[p]] -= Lx_[p] * yi;
      const double l_ki = yi / D_[i];
      D_[k] -= l_ki * yi;
      Li_[p2] = k;
      Lx_[p2] = l_ki;
      ++Lnz_[i];
    }
    if (!std::isfinite(D_[k])) return -1;
    if (signs_[k] * D_[k] <= options_.dynamic_eps) {
      D_[k] = signs_[k] * options_.dynamic_delta;
      ++regularized;
    }
  }
  return regularized;
}

void SparseLdl::solve(Eigen::VectorXd& x) const {
  Eigen::VectorXd y(n_);
  for (int k = 0; k < n_; ++k) y[k] = x[perm_[k]];
  for (int j = 0; j < n_; ++j) {
    const double yj = y[j];
    for (int p = Lp_[j]; p < Lp_[j + 1]; ++p) y[Li_[p]] -= Lx_[p] * yj;
  }
  for (int j = 0; j < n_; ++j) y[j] /= D_[j];
  for (int j = n_ - 1; j >= 0; --j) {
    double yj = y[j];
    for (int p = Lp_[j]; p < Lp_[j + 1]; ++p) yj -= Lx_[p] * y[Li_[p]];
    y[j] = yj;
  }
  for (int k = 0; k < n_; ++k) x[perm_[k]] = y[k];
}

}  // namespace socopf
