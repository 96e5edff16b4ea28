#pragma once

#include <cstddef>
#include <vector>

namespace sliceattrib {

// One ordered slice pair tested within one segment.
struct PairTestResult {
  std::size_t source = 0;
  std::size_t target = 0;
  std::size_t segment = 0;
  double f_tilde = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
  double rho = 0.0;
  double gamma = 0.0;  // fused causal strength
  bool accepted = false;
};

struct CausalGraph {
  std::size_t n_nodes = 0;
  std::vector<PairTestResult> edges;  // accepted results only
};

struct PathHop {
  std::size_t slice = 0;
  std::size_t time = 0;        // sample index (segment start for decoded hops)
  double gamma = 1.0;          // incoming edge strength; 1.0 for the origin
  double p_adjusted = 0.0;     // incoming edge adjusted p-value
  double gamma_margin = 0.0;   // reported parameter-error radius on gamma
};

struct AttributionPath {
  std::vector<PathHop> hops;
  double product_score = 1.0;

  bool empty() const { return hops.empty(); }
};

}  // namespace sliceattrib
