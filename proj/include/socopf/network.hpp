#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "socopf/matpower_io.hpp"

namespace socopf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Per-unit bus. Angles in radians.
struct Bus {
  int index = 0;
  int id = 0;  ///< original MATPOWER bus number
  double G = 0.0;
  double B = 0.0;
  double p_d = 0.0;
  double q_d = 0.0;
  double v_min = 0.9;
  double v_max = 1.1;
  double theta_min = -3.141592653589793;
  double theta_max = 3.141592653589793;
};

/// Per-unit Pi-model branch. K_tilde is a squared-current limit, kInf when unrated.
struct Branch {
  int index = 0;
  int from_bus = 0;
  int to_bus = 0;
  double R = 0.0;
  double X = 0.0;
  double B_s = 0.0;
  double B_r = 0.0;
  double K_tilde = kInf;
  double theta_min = -1.5697963267948966;
  double theta_max = 1.5697963267948966;

  bool rated() const { return K_tilde < kInf; }
};

/// Cost is alpha p^2 + beta p + gamma with p in pu.
struct Generator {
  int index = 0;
  int bus = 0;
  double p_min = 0.0;
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

struct Network {
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  int reference_bus = 0;
  /// |N| x |L|: +1 at the sending end, -1 at the receiving end.
  Eigen::SparseMatrix<double> A_plus;
  /// |N| x |L|: -1 at the receiving end.
  Eigen::SparseMatrix<double> A_minus;
  std::vector<std::string> warnings;
};

enum class PminPolicy {
  Zero,              ///< every generator may be switched down to 0
  ClampNonnegative,  ///< keep MATPOWER Pmin, raised to 0 if negative
};

struct NetworkOptions {
  PminPolicy pmin_policy = PminPolicy::Zero;
  /// Unlimited angle differences are capped at pi/2 - angle_epsilon.
  double angle_epsilon = 1e-3;
};

/// Converts parsed case data to a per-unit network.
///
/// Throws Error with EmptyNetwork, DisconnectedGraph, NonpositiveReactance,
/// InvalidNetwork or UnsupportedCostModel (polynomial degree above 2).
Network build_network(const RawCase& raw, const NetworkOptions& options = {});

/// Rebuilds A_plus / A_minus from the branch list.
void rebuild_incidence(Network& net);

/// Copy of `net` with p_d, q_d replaced by factor * |p_d|, factor * |q_d|.
Network scale_loads(const Network& net, double factor);

struct TreeEdge {
  int branch = 0;
  int parent = 0;
  int child = 0;
  /// True when the branch is oriented parent -> child (parent is the sending end).
  bool forward = true;
};

/// BFS tree from the reference bus, visiting incident branches in index order.
std::vector<TreeEdge> spanning_tree(const Network& net);

/// Branches not in spanning_tree(net), ascending.
std::vector<int> chord_branches(const Network& net);

/// |L| - |N| + 1 for a connected network.
int independent_cycles(const Network& net);

/// Branch indices leaving (sending end) and entering (receiving end) each bus.
struct BusIncidence {
  std::vector<std::vector<int>> sending;
  std::vector<std::vector<int>> receiving;
  std::vector<std::vector<int>> generators;
};
BusIncidence bus_incidence(const Network& net);

}  // namespace socopf
