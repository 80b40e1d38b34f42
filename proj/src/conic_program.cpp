#include "socopf/conic_program.hpp"

#include <cmath>
#include <sstream>

#include "socopf/errors.hpp"
#include "socopf/matpower_io.hpp"

namespace socopf {

double AffineExpr::eval(const Eigen::VectorXd& x) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * x[t.var];
  return v;
}

double LinearRow::eval(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (const auto& t : terms) v += t.coef * x[t.var];
  return v;
}

int ConicProgram::add_variable(std::string name, double lo, double hi) {
  var_names.push_back(std::move(name));
  quad.push_back(0.0);
  linear.push_back(0.0);
  lower.push_back(lo);
  upper.push_back(hi);
  return num_vars() - 1;
}

double ConicProgram::objective(const Eigen::VectorXd& x) const {
  double v = constant;
  for (int j = 0; j < num_vars(); ++j) v += quad[j] * x[j] * x[j] + linear[j] * x[j];
  return v;
}

void ConicProgram::validate() const {
  const auto n = var_names.size();
  if (quad.size() != n || linear.size() != n || lower.size() != n || upper.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "program vectors disagree on the variable count");
  }
  auto check = [&](const std::vector<LinearTerm>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.var < 0 || static_cast<size_t>(t.var) >= n) {
        throw Error(ErrorCode::DimensionMismatch, where + " references an undeclared variable");
      }
    }
  };
  for (const auto& r : eq_rows) check(r.terms, "equality row " + r.name);
  for (const auto& r : le_rows) check(r.terms, "inequality row " + r.name);
  for (const auto& c : rsoc_blocks) {
    check(c.u.terms, "cone " + c.name);
    check(c.v.terms, "cone " + c.name);
    for (const auto& w : c.w) check(w.terms, "cone " + c.name);
  }
  for (const auto& c : soc_blocks) {
    check(c.t.terms, "cone " + c.name);
    for (const auto& w : c.w) check(w.terms, "cone " + c.name);
  }
  for (size_t j = 0; j < n; ++j) {
    if (quad[j] < 0.0) throw Error(ErrorCode::InvalidArgument, "negative quadratic weight");
    if (lower[j] > upper[j]) {
      throw Error(ErrorCode::InvalidArgument, "variable " + var_names[j] + " has lower > upper");
    }
  }
}

StandardForm lower_to_standard_form(const ConicProgram& program, RowMap* rows_out) {
  program.validate();
  StandardForm f;
  f.n = program.num_vars();
  f.c0 = program.constant;
  f.q = Eigen::Map<const Eigen::VectorXd>(program.linear.data(), f.n);

  std::vector<Eigen::Triplet<double>> p_trip;
  for (int j = 0; j < f.n; ++j) {
    if (program.quad[j] != 0.0) p_trip.emplace_back(j, j, 2.0 * program.quad[j]);
  }
  f.P.resize(f.n, f.n);
  f.P.setFromTriplets(p_trip.begin(), p_trip.end());

  RowMap map;
  std::vector<Eigen::Triplet<double>> a_trip;
  std::vector<double> b;
  int row = 0;
  auto add_row = [&](const std::vector<LinearTerm>& terms, double sign, double rhs) {
    for (const auto& t : terms) a_trip.emplace_back(row, t.var, sign * t.coef);
    b.push_back(rhs);
    ++row;
  };
  // A cone entry e(x) = sum c x + k becomes a row with s = b - Ax = e(x).
  auto add_expr = [&](const AffineExpr& e) { add_row(e.terms, -1.0, e.constant); };

  map.eq_begin = row;
  for (const auto& r : program.eq_rows) add_row(r.terms, 1.0, r.rhs);
  map.fixed_begin = row;
  for (int j = 0; j < f.n; ++j) {
    if (program.lower[j] == program.upper[j]) {
      map.fixed_vars.push_back(j);
      add_row({{j, 1.0}}, 1.0, program.lower[j]);
    }
  }
  f.zero = row;

  map.le_begin = row;
  for (const auto& r : program.le_rows) add_row(r.terms, 1.0, r.rhs);
  map.upper_begin = row;
  for (int j = 0; j < f.n; ++j) {
    if (program.lower[j] != program.upper[j] && std::isfinite(program.upper[j])) {
      map.upper_vars.push_back(j);
      add_row({{j, 1.0}}, 1.0, program.upper[j]);
    }
  }
  map.lower_begin = row;
  for (int j = 0; j < f.n; ++j) {
    if (program.lower[j] != program.upper[j] && std::isfinite(program.lower[j])) {
      map.lower_vars.push_back(j);
      add_row({{j, 1.0}}, -1.0, -program.lower[j]);
    }
  }
  f.nonneg = row - f.zero;

  map.soc_begin = row;
  for (const auto& c : program.soc_blocks) {
    add_expr(c.t);
    for (const auto& w : c.w) add_expr(w);
    f.soc.push_back(static_cast<int>(1 + c.w.size()));
  }
  map.rsoc_begin = row;
  for (const auto& c : program.rsoc_blocks) {
    add_expr(c.u);
    add_expr(c.v);
    for (const auto& w : c.w) add_expr(w);
    f.rsoc.push_back(static_cast<int>(2 + c.w.size()));
  }

  f.m = row;
  f.A.resize(f.m, f.n);
  f.A.setFromTriplets(a_trip.begin(), a_trip.end());
  f.A.prune(0.0);
  f.b = Eigen::Map<const Eigen::VectorXd>(b.data(), f.m);
  if (rows_out) *rows_out = std::move(map);
  return f;
}

std::string dump_standard_form(const StandardForm& f) {
  std::ostringstream os;
  os << "SOCOPF-CONIC 1\n";
  os << "dims " << f.n << ' ' << f.m << '\n';
  os << "cones " << f.zero << ' ' << f.nonneg << ' ' << f.soc.size();
  for (int s : f.soc) os << ' ' << s;
  os << ' ' << f.rsoc.size();
  for (int s : f.rsoc) os << ' ' << s;
  os << '\n';
  os << "constant " << format_double(f.c0) << '\n';
  auto triplets = [&](const char* tag, const Eigen::SparseMatrix<double>& M) {
    os << tag << ' ' << M.nonZeros() << '\n';
    for (int j = 0; j < M.outerSize(); ++j) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(M, j); it; ++it) {
        os << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
      }
    }
  };
  auto vector = [&](const char* tag, const Eigen::VectorXd& v) {
    os << tag << ' ' << v.size() << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << format_double(v[i]) << '\n';
  };
  triplets("P", f.P);
  vector("q", f.q);
  triplets("A", f.A);
  vector("b", f.b);
  os << "end\n";
  return os.str();
}

StandardForm parse_standard_form(std::string_view text) {
  std::istringstream is{std::string(text)};
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::MalformedRow, "conic dump: " + what);
  };
  auto expect = [&](const char* word) {
    std::string tok;
    if (!(is >> tok) || tok != word) fail(std::string("expected '") + word + "'");
  };
  StandardForm f;
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "SOCOPF-CONIC" || version != 1) fail("bad header");
  expect("dims");
  is >> f.n >> f.m;
  expect("cones");
  size_t count = 0;
  is >> f.zero >> f.nonneg >> count;
  f.soc.resize(count);
  for (auto& s : f.soc) is >> s;
  is >> count;
  f.rsoc.resize(count);
  for (auto& s : f.rsoc) is >> s;
  expect("constant");
  is >> f.c0;
  auto triplets = [&](const char* tag, Eigen::SparseMatrix<double>& M, int rows, int cols) {
    expect(tag);
    long nnz = 0;
    is >> nnz;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<size_t>(nnz));
    for (long k = 0; k < nnz; ++k) {
      int i = 0;
      int j = 0;
      double v = 0.0;
      if (!(is >> i >> j >> v) || i < 0 || j < 0 || i >= rows || j >= cols) fail("bad triplet");
      t.emplace_back(i, j, v);
    }
    M.resize(rows, cols);
    M.setFromTriplets(t.begin(), t.end());
  };
  auto vector = [&](const char* tag, Eigen::VectorXd& v, int size) {
    expect(tag);
    int len = 0;
    is >> len;
    if (len != size) fail(std::string("wrong length for ") + tag);
    v.resize(size);
    for (int i = 0; i < size; ++i) {
      if (!(is >> v[i])) fail(std::string("short vector ") + tag);
    }
  };
  triplets("P", f.P, f.n, f.n);
  vector("q", f.q, f.n);
  triplets("A", f.A, f.m, f.n);
  vector("b", f.b, f.m);
  expect("end");
  int cone_rows = f.zero + f.nonneg;
  for (int s : f.soc) cone_rows += s;
  for (int s : f.rsoc) cone_rows += s;
  if (cone_rows != f.m) fail("cone sizes do not add up to m");
  return f;
}

}  // namespace socopf
