#include "socopf/network.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <unordered_map>

#include "socopf/errors.hpp"

namespace socopf {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

/// Symmetric angle-difference limit in radians from MATPOWER angmin/angmax.
double angle_limit(double angmin, double angmax, double cap, bool& asymmetric) {
  asymmetric = false;
  if (angmin == 0.0 && angmax == 0.0) return cap;
  auto one = [&](double deg) {
    if (std::abs(deg) >= 360.0) return cap;
    return std::min(std::abs(deg) * kDegToRad, cap);
  };
  const double lo = one(angmin);
  const double hi = one(angmax);
  asymmetric = lo != hi || angmin > 0.0 || angmax < 0.0;
  if (angmin > 0.0 || angmax < 0.0) return 0.0;
  return std::min(lo, hi);
}

}  // namespace

void rebuild_incidence(Network& net) {
  const auto n = static_cast<Eigen::Index>(net.buses.size());
  const auto m = static_cast<Eigen::Index>(net.branches.size());
  std::vector<Eigen::Triplet<double>> plus;
  std::vector<Eigen::Triplet<double>> minus;
  plus.reserve(2 * net.branches.size());
  minus.reserve(net.branches.size());
  for (const auto& br : net.branches) {
    plus.emplace_back(br.from_bus, br.index, 1.0);
    plus.emplace_back(br.to_bus, br.index, -1.0);
    minus.emplace_back(br.to_bus, br.index, -1.0);
  }
  net.A_plus.resize(n, m);
  net.A_minus.resize(n, m);
  net.A_plus.setFromTriplets(plus.begin(), plus.end());
  net.A_minus.setFromTriplets(minus.begin(), minus.end());
}

Network build_network(const RawCase& raw, const NetworkOptions& options) {
  if (raw.buses.empty()) throw Error(ErrorCode::EmptyNetwork, "case has no buses");
  if (!(raw.base_mva > 0.0)) throw Error(ErrorCode::InvalidNetwork, "baseMVA must be positive");

  Network net;
  net.base_mva = raw.base_mva;
  net.warnings = raw.warnings;
  const double base = raw.base_mva;
  const double cap = std::numbers::pi / 2.0 - options.angle_epsilon;

  std::unordered_map<int, int> index_of;
  int reference = -1;
  for (const auto& row : raw.buses) {
    Bus b;
    b.index = static_cast<int>(net.buses.size());
    b.id = row.id;
    if (!index_of.emplace(row.id, b.index).second) {
      throw Error(ErrorCode::InvalidNetwork, "duplicate bus id " + std::to_string(row.id));
    }
    b.G = row.gs / base;
    b.B = row.bs / base;
    b.p_d = row.pd / base;
    b.q_d = row.qd / base;
    b.v_min = row.vmin;
    b.v_max = row.vmax;
    if (!(b.v_min > 0.0) || !(b.v_min <= b.v_max)) {
      throw Error(ErrorCode::InvalidNetwork,
                  "bus " + std::to_string(row.id) + " needs 0 < Vmin <= Vmax");
    }
    if (!std::isfinite(b.p_d) || !std::isfinite(b.q_d)) {
      throw Error(ErrorCode::InvalidNetwork, "bus " + std::to_string(row.id) + " has a non-finite load");
    }
    if (row.type == 3 && reference < 0) reference = b.index;
    net.buses.push_back(b);
  }

  for (const auto& row : raw.branches) {
    Branch br;
    br.index = static_cast<int>(net.branches.size());
    br.from_bus = index_of.at(row.from);
    br.to_bus = index_of.at(row.to);
    const std::string name = std::to_string(row.from) + "-" + std::to_string(row.to);
    if (br.from_bus == br.to_bus) {
      throw Error(ErrorCode::InvalidNetwork, "branch " + name + " is a self loop");
    }
    if (!(row.x > 0.0)) {
      throw Error(ErrorCode::NonpositiveReactance, "branch " + name + " has x <= 0");
    }
    if (row.r < 0.0) throw Error(ErrorCode::InvalidNetwork, "branch " + name + " has r < 0");
    if (row.angle != 0.0) {
      net.warnings.push_back("branch " + name + ": phase shift ignored");
    }

    // Off-nominal tap folded into an equivalent Pi: series z*t, end shunts from
    // the exact two-port equivalence. Real shunt parts go to the bus conductance.
    const double t = row.ratio == 0.0 ? 1.0 : row.ratio;
    const std::complex<double> ys = 1.0 / std::complex<double>(row.r, row.x);
    const std::complex<double> y_from =
        ys * (1.0 - t) / (t * t) + std::complex<double>(0.0, row.b / (2.0 * t * t));
    const std::complex<double> y_to = ys * (t - 1.0) / t + std::complex<double>(0.0, row.b / 2.0);
    br.R = row.r * t;
    br.X = row.x * t;
    br.B_s = y_from.imag();
    br.B_r = y_to.imag();
    net.buses[br.from_bus].G += y_from.real();
    net.buses[br.to_bus].G += y_to.real();

    br.K_tilde = row.rate_a > 0.0 ? (row.rate_a / base) * (row.rate_a / base) : kInf;

    bool asymmetric = false;
    const double lim = angle_limit(row.angmin, row.angmax, cap, asymmetric);
    if (asymmetric) {
      net.warnings.push_back("branch " + name + ": angle limits symmetrized to +-" +
                             format_double(lim) + " rad");
    }
    br.theta_min = -lim;
    br.theta_max = lim;
    net.branches.push_back(br);
  }

  for (size_t k = 0; k < raw.gens.size(); ++k) {
    const auto& row = raw.gens[k];
    Generator g;
    g.index = static_cast<int>(net.generators.size());
    g.bus = index_of.at(row.bus);
    g.p_max = row.pmax / base;
    g.p_min = options.pmin_policy == PminPolicy::Zero ? 0.0 : std::max(0.0, row.pmin / base);
    g.q_min = row.qmin / base;
    g.q_max = row.qmax / base;
    if (g.p_max < g.p_min || g.q_max < g.q_min) {
      throw Error(ErrorCode::InvalidNetwork,
                  "generator at bus " + std::to_string(row.bus) + " has inverted limits");
    }
    const auto& c = raw.gencosts.at(k).coefficients;
    if (c.size() > 3) {
      // Higher-order terms with zero coefficients are harmless.
      for (size_t i = 0; i + 3 < c.size(); ++i) {
        if (c[i] != 0.0) {
          throw Error(ErrorCode::UnsupportedCostModel,
                      "generator at bus " + std::to_string(row.bus) + " has a cost of degree > 2");
        }
      }
    }
    auto coef = [&](size_t power) {
      return power < c.size() ? c[c.size() - 1 - power] : 0.0;
    };
    g.alpha = coef(2) * base * base;
    g.beta = coef(1) * base;
    g.gamma = coef(0);
    if (g.alpha < 0.0) {
      throw Error(ErrorCode::InvalidNetwork,
                  "generator at bus " + std::to_string(row.bus) + " has a concave cost");
    }
    net.generators.push_back(g);
  }

  if (reference < 0) {
    reference = net.generators.empty() ? 0 : net.generators.front().bus;
    net.warnings.push_back("no type-3 bus; using bus " + std::to_string(net.buses[reference].id) +
                           " as reference");
  }
  net.reference_bus = reference;
  net.buses[reference].theta_min = 0.0;
  net.buses[reference].theta_max = 0.0;

  rebuild_incidence(net);

  if (spanning_tree(net).size() + 1 != net.buses.size()) {
    throw Error(ErrorCode::DisconnectedGraph, "branch graph is not connected");
  }
  return net;
}

Network scale_loads(const Network& net, double factor) {
  if (!(factor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "load factor must be >= 0");
  Network out = net;
  for (auto& b : out.buses) {
    b.p_d = factor * std::abs(b.p_d);
    b.q_d = factor * std::abs(b.q_d);
  }
  return out;
}

BusIncidence bus_incidence(const Network& net) {
  BusIncidence inc;
  inc.sending.resize(net.buses.size());
  inc.receiving.resize(net.buses.size());
  inc.generators.resize(net.buses.size());
  for (const auto& br : net.branches) {
    inc.sending[br.from_bus].push_back(br.index);
    inc.receiving[br.to_bus].push_back(br.index);
  }
  for (const auto& g : net.generators) inc.generators[g.bus].push_back(g.index);
  return inc;
}

std::vector<TreeEdge> spanning_tree(const Network& net) {
  const size_t n = net.buses.size();
  std::vector<std::vector<int>> incident(n);
  for (const auto& br : net.branches) {
    incident[br.from_bus].push_back(br.index);
    incident[br.to_bus].push_back(br.index);
  }
  std::vector<TreeEdge> tree;
  if (n == 0) return tree;
  tree.reserve(n - 1);
  std::vector<char> seen(n, 0);
  std::deque<int> queue{net.reference_bus};
  seen[net.reference_bus] = 1;
  while (!queue.empty()) {
    const int bus = queue.front();
    queue.pop_front();
    for (int l : incident[bus]) {
      const auto& br = net.branches[l];
      const int other = br.from_bus == bus ? br.to_bus : br.from_bus;
      if (seen[other]) continue;
      seen[other] = 1;
      tree.push_back({l, bus, other, br.from_bus == bus});
      queue.push_back(other);
    }
  }
  return tree;
}

std::vector<int> chord_branches(const Network& net) {
  std::vector<char> in_tree(net.branches.size(), 0);
  for (const auto& e : spanning_tree(net)) in_tree[e.branch] = 1;
  std::vector<int> chords;
  for (size_t l = 0; l < in_tree.size(); ++l) {
    if (!in_tree[l]) chords.push_back(static_cast<int>(l));
  }
  return chords;
}

int independent_cycles(const Network& net) {
  return static_cast<int>(net.branches.size()) - static_cast<int>(net.buses.size()) + 1;
}

}  // namespace socopf
