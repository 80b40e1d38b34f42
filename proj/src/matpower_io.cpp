#include "socopf/matpower_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "socopf/errors.hpp"

namespace socopf {

namespace {

using Matrix = std::vector<std::vector<double>>;

std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_comment = false;
  bool in_string = false;
  for (char c : text) {
    if (c == '\n') {
      in_comment = false;
      in_string = false;
      out.push_back(c);
      continue;
    }
    if (in_comment) continue;
    if (c == '\'') in_string = !in_string;
    if (c == '%' && !in_string) {
      in_comment = true;
      continue;
    }
    out.push_back(c);
  }
  return out;
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

/// Position just after `mpc.<name> = <opener>`, if present.
std::optional<size_t> find_field(const std::string& text, std::string_view name, char opener) {
  const std::string key = "mpc." + std::string(name);
  size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    size_t p = pos + key.size();
    const bool word_start = pos == 0 || !is_ident_char(text[pos - 1]);
    if (!word_start || (p < text.size() && is_ident_char(text[p]))) {
      pos = p;
      continue;
    }
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    if (p >= text.size() || text[p] != '=') {
      pos = p;
      continue;
    }
    ++p;
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    if (opener == '\0') return p;
    if (p < text.size() && text[p] == opener) return p + 1;
    pos = p;
  }
  return std::nullopt;
}

double parse_number(std::string_view token, std::string_view matrix, size_t row) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::MalformedRow, "mpc." + std::string(matrix) + " row " +
                                             std::to_string(row + 1) + ": non-numeric token '" +
                                             std::string(token) + "'");
  }
  return value;
}

Matrix parse_matrix(const std::string& text, std::string_view name) {
  const auto start = find_field(text, name, '[');
  if (!start) {
    throw Error(ErrorCode::MissingMatrix, "mpc." + std::string(name) + " not found");
  }
  const size_t end = text.find(']', *start);
  if (end == std::string::npos) {
    throw Error(ErrorCode::MalformedRow, "mpc." + std::string(name) + " is not terminated");
  }
  std::string body = text.substr(*start, end - *start);
  // Line continuations join physical lines into one row.
  for (size_t p = 0; (p = body.find("...", p)) != std::string::npos;) {
    size_t q = body.find('\n', p);
    if (q == std::string::npos) q = body.size();
    body.replace(p, q - p + (q < body.size() ? 1 : 0), " ");
  }

  Matrix rows;
  std::vector<double> current;
  std::string token;
  auto flush_token = [&] {
    if (!token.empty()) {
      current.push_back(parse_number(token, name, rows.size()));
      token.clear();
    }
  };
  auto flush_row = [&] {
    flush_token();
    if (!current.empty()) {
      rows.push_back(std::move(current));
      current.clear();
    }
  };
  for (char c : body) {
    if (c == ';' || c == '\n' || c == '\r') {
      flush_row();
    } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      flush_token();
    } else {
      token.push_back(c);
    }
  }
  flush_row();

  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw Error(ErrorCode::MalformedRow, "mpc." + std::string(name) + " row " +
                                               std::to_string(r + 1) + " has " +
                                               std::to_string(rows[r].size()) + " columns, expected " +
                                               std::to_string(rows[0].size()));
    }
  }
  return rows;
}

void require_columns(const Matrix& m, size_t min_cols, std::string_view name) {
  for (size_t r = 0; r < m.size(); ++r) {
    if (m[r].size() < min_cols) {
      throw Error(ErrorCode::MalformedRow, "mpc." + std::string(name) + " row " +
                                               std::to_string(r + 1) + " has " +
                                               std::to_string(m[r].size()) +
                                               " columns, needs at least " + std::to_string(min_cols));
    }
  }
}

int as_int(double v, std::string_view name, size_t row) {
  if (!std::isfinite(v) || v != std::round(v)) {
    throw Error(ErrorCode::MalformedRow, "mpc." + std::string(name) + " row " +
                                             std::to_string(row + 1) + ": expected an integer id");
  }
  return static_cast<int>(v);
}

double parse_base_mva(const std::string& text) {
  const auto start = find_field(text, "baseMVA", '\0');
  if (!start) throw Error(ErrorCode::MissingMatrix, "mpc.baseMVA not found");
  size_t end = *start;
  while (end < text.size() && text[end] != ';' && text[end] != '\n') ++end;
  std::string token = text.substr(*start, end - *start);
  token.erase(std::remove_if(token.begin(), token.end(),
                             [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
              token.end());
  const double base = parse_number(token, "baseMVA", 0);
  if (!(base > 0.0)) throw Error(ErrorCode::MalformedRow, "mpc.baseMVA must be positive");
  return base;
}

}  // namespace

bool RawCase::same_data(const RawCase& other) const {
  return base_mva == other.base_mva && buses == other.buses && gens == other.gens &&
         branches == other.branches && gencosts == other.gencosts;
}

RawCase parse_case(std::string_view text) {
  const std::string clean = strip_comments(text);
  RawCase out;
  out.base_mva = parse_base_mva(clean);

  const Matrix bus = parse_matrix(clean, "bus");
  const Matrix gen = parse_matrix(clean, "gen");
  const Matrix branch = parse_matrix(clean, "branch");
  const Matrix gencost = parse_matrix(clean, "gencost");
  require_columns(bus, 13, "bus");
  require_columns(gen, 10, "gen");
  require_columns(branch, 11, "branch");
  require_columns(gencost, 4, "gencost");

  for (size_t r = 0; r < bus.size(); ++r) {
    const auto& v = bus[r];
    BusRow row;
    row.id = as_int(v[0], "bus", r);
    row.type = as_int(v[1], "bus", r);
    row.pd = v[2];
    row.qd = v[3];
    row.gs = v[4];
    row.bs = v[5];
    row.area = as_int(v[6], "bus", r);
    row.vm = v[7];
    row.va = v[8];
    row.base_kv = v[9];
    row.zone = as_int(v[10], "bus", r);
    row.vmax = v[11];
    row.vmin = v[12];
    out.buses.push_back(row);
  }

  if (gencost.size() < gen.size()) {
    throw Error(ErrorCode::MalformedRow, "mpc.gencost has " + std::to_string(gencost.size()) +
                                             " rows for " + std::to_string(gen.size()) + " generators");
  }
  if (gencost.size() > gen.size()) {
    out.warnings.push_back("ignored " + std::to_string(gencost.size() - gen.size()) +
                           " reactive-power gencost rows");
  }

  for (size_t r = 0; r < gen.size(); ++r) {
    const auto& v = gen[r];
    GenRow row;
    row.bus = as_int(v[0], "gen", r);
    row.pg = v[1];
    row.qg = v[2];
    row.qmax = v[3];
    row.qmin = v[4];
    row.vg = v[5];
    row.mbase = v[6];
    row.status = as_int(v[7], "gen", r);
    row.pmax = v[8];
    row.pmin = v[9];

    const auto& c = gencost[r];
    const int model = as_int(c[0], "gencost", r);
    if (model == 1) {
      throw Error(ErrorCode::UnsupportedCostModel,
                  "mpc.gencost row " + std::to_string(r + 1) + " is piecewise linear");
    }
    if (model != 2) {
      throw Error(ErrorCode::MalformedRow,
                  "mpc.gencost row " + std::to_string(r + 1) + " has unknown model code");
    }
    const int n = as_int(c[3], "gencost", r);
    if (n < 0 || c.size() < 4 + static_cast<size_t>(n)) {
      throw Error(ErrorCode::MalformedRow,
                  "mpc.gencost row " + std::to_string(r + 1) + " is shorter than its coefficient count");
    }
    GencostRow cost;
    cost.model = CostModel::Polynomial;
    cost.startup = c[1];
    cost.shutdown = c[2];
    cost.coefficients.assign(c.begin() + 4, c.begin() + 4 + n);

    if (row.status <= 0) {
      out.warnings.push_back("dropped out-of-service generator at bus " + std::to_string(row.bus) +
                             " (gen row " + std::to_string(r + 1) + ")");
      continue;
    }
    out.gens.push_back(row);
    out.gencosts.push_back(std::move(cost));
  }

  for (size_t r = 0; r < branch.size(); ++r) {
    const auto& v = branch[r];
    BranchRow row;
    row.from = as_int(v[0], "branch", r);
    row.to = as_int(v[1], "branch", r);
    row.r = v[2];
    row.x = v[3];
    row.b = v[4];
    row.rate_a = v[5];
    row.rate_b = v[6];
    row.rate_c = v[7];
    row.ratio = v[8];
    row.angle = v[9];
    row.status = as_int(v[10], "branch", r);
    if (v.size() >= 13) {
      row.angmin = v[11];
      row.angmax = v[12];
    }
    if (row.status <= 0) {
      out.warnings.push_back("dropped out-of-service branch " + std::to_string(row.from) + "-" +
                             std::to_string(row.to) + " (branch row " + std::to_string(r + 1) + ")");
      continue;
    }
    out.branches.push_back(row);
  }

  std::vector<int> ids;
  ids.reserve(out.buses.size());
  for (const auto& b : out.buses) ids.push_back(b.id);
  std::sort(ids.begin(), ids.end());
  auto known = [&](int id) { return std::binary_search(ids.begin(), ids.end(), id); };
  for (size_t k = 0; k < out.gens.size(); ++k) {
    if (!known(out.gens[k].bus)) {
      throw Error(ErrorCode::MalformedRow,
                  "generator references unknown bus " + std::to_string(out.gens[k].bus));
    }
  }
  for (const auto& br : out.branches) {
    if (!known(br.from) || !known(br.to)) {
      throw Error(ErrorCode::MalformedRow, "branch " + std::to_string(br.from) + "-" +
                                               std::to_string(br.to) + " references an unknown bus");
    }
  }
  return out;
}

RawCase read_case_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::CaseFileNotFound, "case file not found: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_case(buffer.str());
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  std::string s(buf.data(), ptr);
  if (s == "inf") return "Inf";
  if (s == "-inf") return "-Inf";
  return s;
}

std::string write_case(const RawCase& raw, std::string_view function_name) {
  std::ostringstream os;
  auto num = [](double v) { return format_double(v); };
  os << "function mpc = " << function_name << "\n";
  os << "mpc.version = '2';\n";
  os << "mpc.baseMVA = " << num(raw.base_mva) << ";\n\n";

  os << "%% bus_i type Pd Qd Gs Bs area Vm Va baseKV zone Vmax Vmin\n";
  os << "mpc.bus = [\n";
  for (const auto& b : raw.buses) {
    os << '\t' << b.id << '\t' << b.type << '\t' << num(b.pd) << '\t' << num(b.qd) << '\t'
       << num(b.gs) << '\t' << num(b.bs) << '\t' << b.area << '\t' << num(b.vm) << '\t'
       << num(b.va) << '\t' << num(b.base_kv) << '\t' << b.zone << '\t' << num(b.vmax) << '\t'
       << num(b.vmin) << ";\n";
  }
  os << "];\n\n";

  os << "%% bus Pg Qg Qmax Qmin Vg mBase status Pmax Pmin\n";
  os << "mpc.gen = [\n";
  for (const auto& g : raw.gens) {
    os << '\t' << g.bus << '\t' << num(g.pg) << '\t' << num(g.qg) << '\t' << num(g.qmax) << '\t'
       << num(g.qmin) << '\t' << num(g.vg) << '\t' << num(g.mbase) << '\t' << g.status << '\t'
       << num(g.pmax) << '\t' << num(g.pmin) << ";\n";
  }
  os << "];\n\n";

  os << "%% fbus tbus r x b rateA rateB rateC ratio angle status angmin angmax\n";
  os << "mpc.branch = [\n";
  for (const auto& br : raw.branches) {
    os << '\t' << br.from << '\t' << br.to << '\t' << num(br.r) << '\t' << num(br.x) << '\t'
       << num(br.b) << '\t' << num(br.rate_a) << '\t' << num(br.rate_b) << '\t' << num(br.rate_c)
       << '\t' << num(br.ratio) << '\t' << num(br.angle) << '\t' << br.status << '\t'
       << num(br.angmin) << '\t' << num(br.angmax) << ";\n";
  }
  os << "];\n\n";

  // Rows are padded to a common width; trailing zeros beyond n are ignored on parse.
  size_t width = 0;
  for (const auto& c : raw.gencosts) width = std::max(width, c.coefficients.size());
  os << "%% 2 startup shutdown n c(n-1) ... c0\n";
  os << "mpc.gencost = [\n";
  for (const auto& c : raw.gencosts) {
    os << '\t' << static_cast<int>(c.model) << '\t' << num(c.startup) << '\t' << num(c.shutdown)
       << '\t' << c.coefficients.size();
    for (double v : c.coefficients) os << '\t' << num(v);
    for (size_t k = c.coefficients.size(); k < width; ++k) os << "\t0";
    os << ";\n";
  }
  os << "];\n";
  return os.str();
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace {

nlohmann::ordered_json report_to_json(const GapReport& r) {
  nlohmann::ordered_json j;
  j["load_factor"] = r.load_factor;
  j["objective"] = r.objective;
  j["gap_po_max"] = r.gap_po_max;
  j["gap_qo_max"] = r.gap_qo_max;
  j["argmax_branch_po"] = r.argmax_branch_po;
  j["argmax_branch_qo"] = r.argmax_branch_qo;
  j["tightened"] = r.tightened;
  auto branches = nlohmann::ordered_json::array();
  for (const auto& g : r.per_branch) {
    nlohmann::ordered_json e;
    e["branch"] = g.branch;
    e["gap_po"] = g.gap_po;
    e["gap_qo"] = g.gap_qo;
    branches.push_back(std::move(e));
  }
  j["per_branch"] = std::move(branches);
  auto loads = nlohmann::ordered_json::array();
  for (const auto& l : r.load_increase) {
    nlohmann::ordered_json e;
    e["bus"] = l.bus;
    e["dp_d"] = l.dp_d;
    e["dq_d"] = l.dq_d;
    loads.push_back(std::move(e));
  }
  j["load_increase"] = std::move(loads);
  return j;
}

}  // namespace

std::string write_report(const GapReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    nlohmann::ordered_json root;
    root["compute_gaps"] = report_to_json(report);
    return root.dump(2) + "\n";
  }
  std::string out = "branch,gap_po,gap_qo\r\n";
  for (const auto& g : report.per_branch) {
    out += std::to_string(g.branch) + "," + format_double(g.gap_po) + "," +
           format_double(g.gap_qo) + "\r\n";
  }
  return out;
}

GapReport parse_report_json(std::string_view text) {
  const auto root = nlohmann::json::parse(text);
  const auto& j = root.at("compute_gaps");
  GapReport r;
  r.load_factor = j.at("load_factor").get<double>();
  r.objective = j.at("objective").get<double>();
  r.gap_po_max = j.at("gap_po_max").get<double>();
  r.gap_qo_max = j.at("gap_qo_max").get<double>();
  r.argmax_branch_po = j.at("argmax_branch_po").get<int>();
  r.argmax_branch_qo = j.at("argmax_branch_qo").get<int>();
  r.tightened = j.at("tightened").get<bool>();
  for (const auto& e : j.at("per_branch")) {
    r.per_branch.push_back(
        {e.at("branch").get<int>(), e.at("gap_po").get<double>(), e.at("gap_qo").get<double>()});
  }
  for (const auto& e : j.at("load_increase")) {
    r.load_increase.push_back(
        {e.at("bus").get<int>(), e.at("dp_d").get<double>(), e.at("dq_d").get<double>()});
  }
  return r;
}

}  // namespace socopf
