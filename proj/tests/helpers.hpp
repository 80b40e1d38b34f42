#pragma once

#include <filesystem>
#include <string>

#include "socopf/matpower_io.hpp"
#include "socopf/network.hpp"

namespace socopf::test {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(SOCOPF_DATA_DIR) / name;
}

inline Network load_network(const std::string& name) {
  return build_network(read_case_file(data_path(name)));
}

/// Two buses, one branch (r 0.01, x 0.1, b 0.02), one generator with a quadratic cost.
inline const char* kTwoBusCase = R"(function mpc = two_bus
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0  0 0 0 1 1 0 230 1 1.1 0.9;
  2 1 10 2 0 0 1 1 0 230 1 1.1 0.9;
];
mpc.gen = [
  1 0 0 100 -100 1 100 1 200 0;
];
mpc.branch = [
  1 2 0.01 0.1 0.02 0 0 0 0 0 1 -360 360;
];
mpc.gencost = [
  2 0 0 3 0.1 20 5;
];
)";

}  // namespace socopf::test
