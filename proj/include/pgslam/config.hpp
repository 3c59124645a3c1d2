#pragma once

#include <stdexcept>
#include <string>

namespace pgslam {

enum class WeightMode { node_info, edge_info };

struct RunConfig {
  double cell_size = 1.0;
  double s = 0.5;
  WeightMode weight_mode = WeightMode::edge_info;
  double submap_side = 10.0;
  int window = 5;
  double huber_delta = 1.0;
  int max_iter = 100;
  double tol = 1e-9;
  double deadline_ms = 50.0;
  unsigned seed = 0;
  bool single_thread = false;
  bool timing = false;

  void validate() const {
    if (cell_size <= 0) throw std::invalid_argument("cell_size must be positive");
    if (s < 0 || s > 1) throw std::invalid_argument("s must lie in [0,1]");
    if (submap_side <= 0) throw std::invalid_argument("submap side must be positive");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (huber_delta <= 0) throw std::invalid_argument("huber delta must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (tol <= 0) throw std::invalid_argument("tol must be positive");
    if (deadline_ms < 0) throw std::invalid_argument("deadline must be >= 0");
  }
};

inline std::string to_string(WeightMode m) {
  return m == WeightMode::node_info ? "node" : "edge";
}

}  // namespace pgslam
