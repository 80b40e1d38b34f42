#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace socopf {

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

/// sum(coef * x[var]) + constant
struct AffineExpr {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  static AffineExpr var(int index, double coef = 1.0) { return {{{index, coef}}, 0.0}; }
  double eval(const Eigen::VectorXd& x) const;
};

/// sum(coef * x[var]) (= or <=) rhs
struct LinearRow {
  std::vector<LinearTerm> terms;
  double rhs = 0.0;
  std::string name;

  double eval(const Eigen::VectorXd& x) const;
};

/// 2 u v >= |w|^2, u >= 0, v >= 0
struct RotatedCone {
  AffineExpr u;
  AffineExpr v;
  std::vector<AffineExpr> w;
  std::string name;
};

/// t >= |w|
struct SecondOrderCone {
  AffineExpr t;
  std::vector<AffineExpr> w;
  std::string name;
};

/// minimize sum(quad_i x_i^2) + linear'x + constant subject to linear rows,
/// variable bounds and cones.
struct ConicProgram {
  std::vector<std::string> var_names;
  std::vector<double> quad;
  std::vector<double> linear;
  double constant = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LinearRow> eq_rows;
  std::vector<LinearRow> le_rows;
  std::vector<RotatedCone> rsoc_blocks;
  std::vector<SecondOrderCone> soc_blocks;
  std::vector<std::string> warnings;

  int num_vars() const { return static_cast<int>(var_names.size()); }
  int add_variable(std::string name, double lo, double hi);
  double objective(const Eigen::VectorXd& x) const;
  /// Throws DimensionMismatch or InvalidArgument when a block references a missing
  /// variable or a quadratic weight is negative.
  void validate() const;
};

/// minimize 1/2 x'Px + q'x + c0 subject to Ax + s = b, s in K, with K the product
/// zero^z x nonneg^l x SOC(soc[0]) x ... x RSOC(rsoc[0]) x ... in that order.
/// RSOC blocks are ordered (u, v, w...) and mean 2uv >= |w|^2.
struct StandardForm {
  int n = 0;
  int m = 0;
  Eigen::SparseMatrix<double> P;  ///< upper triangle
  Eigen::VectorXd q;
  double c0 = 0.0;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  int zero = 0;
  int nonneg = 0;
  std::vector<int> soc;
  std::vector<int> rsoc;

  /// Row offset of the first cone block.
  int cone_offset() const { return zero + nonneg; }
};

/// Row layout of StandardForm rows created from a ConicProgram.
struct RowMap {
  int eq_begin = 0;        ///< eq_rows[i] -> row eq_begin + i
  int fixed_begin = 0;     ///< variables with lower == upper
  std::vector<int> fixed_vars;
  int le_begin = 0;        ///< le_rows[i] -> row le_begin + i
  int upper_begin = 0;     ///< finite upper bounds
  std::vector<int> upper_vars;
  int lower_begin = 0;     ///< finite lower bounds
  std::vector<int> lower_vars;
  int soc_begin = 0;
  int rsoc_begin = 0;
};

StandardForm lower_to_standard_form(const ConicProgram& program, RowMap* rows = nullptr);

/// Plain-text sparse dump of a StandardForm:
///
///   SOCOPF-CONIC 1
///   dims <n> <m>
///   cones <zero> <nonneg> <#soc> <sizes...> <#rsoc> <sizes...>
///   constant <c0>
///   P <nnz>        then nnz lines "i j v" (upper triangle, 0-based)
///   q <n>          then n values
///   A <nnz>        then nnz lines "i j v"
///   b <m>          then m values
///   end
std::string dump_standard_form(const StandardForm& form);
StandardForm parse_standard_form(std::string_view text);

}  // namespace socopf
