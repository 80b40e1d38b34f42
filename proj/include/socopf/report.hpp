#pragma once

#include <vector>

namespace socopf {

/// Relaxation gaps of one branch, in pu, measured with sending-end quantities.
struct BranchGap {
  int branch = 0;
  double gap_po = 0.0;
  double gap_qo = 0.0;

  bool operator==(const BranchGap&) const = default;
};

/// Load added at one bus by the tightening procedure, in pu.
struct LoadIncrease {
  int bus = 0;
  double dp_d = 0.0;
  double dq_d = 0.0;

  bool operator==(const LoadIncrease&) const = default;
};

struct GapReport {
  std::vector<BranchGap> per_branch;
  double gap_po_max = 0.0;
  double gap_qo_max = 0.0;
  /// Branch attaining gap_po_max / gap_qo_max, -1 for an empty network.
  int argmax_branch_po = -1;
  int argmax_branch_qo = -1;
  double objective = 0.0;
  double load_factor = 1.0;
  bool tightened = false;
  std::vector<LoadIncrease> load_increase;

  bool operator==(const GapReport&) const = default;
};

}  // namespace socopf
