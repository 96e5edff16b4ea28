// Brute-force reference for maximum-product path decoding, shared by the unit
// test and the acceptance suite.  Enumerates every simple segment-monotone
// edge sequence directly from the definition (no pruning, no shared code with
// the library's decoder) and keeps the best product over inclusion-maximal
// ones: paths that admit no further edge at the tail and no incoming edge at
// the head whose segment precedes the first hop and whose source is unused.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sliceattrib/graph.hpp"
#include "sliceattrib/rng.hpp"

namespace pathtest {

struct OracleState {
  const sliceattrib::CausalGraph* g = nullptr;
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> edge_idx;
  std::vector<bool> used;
  double best = 0.0;
  bool found = false;
};

inline bool oracle_head_maximal(const OracleState& st) {
  const std::size_t head = st.nodes.front();
  const std::size_t first_seg = st.g->edges[st.edge_idx.front()].segment;
  for (std::size_t e = 0; e < st.g->edges.size(); ++e) {
    const auto& edge = st.g->edges[e];
    if (edge.target != head || edge.segment > first_seg) continue;
    if (!st.used[edge.source]) return false;
  }
  return true;
}

inline void oracle_extend(OracleState& st, std::size_t node,
                          std::size_t min_seg, double product) {
  bool extended = false;
  for (std::size_t e = 0; e < st.g->edges.size(); ++e) {
    const auto& edge = st.g->edges[e];
    if (edge.source != node || edge.segment < min_seg || st.used[edge.target])
      continue;
    extended = true;
    st.used[edge.target] = true;
    st.nodes.push_back(edge.target);
    st.edge_idx.push_back(e);
    oracle_extend(st, edge.target, edge.segment, product * edge.gamma);
    st.edge_idx.pop_back();
    st.nodes.pop_back();
    st.used[edge.target] = false;
  }
  if (!extended && !st.edge_idx.empty() && oracle_head_maximal(st)) {
    if (!st.found || product > st.best) {
      st.best = product;
      st.found = true;
    }
  }
}

// Best product over all inclusion-maximal simple segment-monotone paths;
// returns 1.0 (the empty-path score) when no edge exists.
inline double oracle_best_product(const sliceattrib::CausalGraph& g) {
  OracleState st;
  st.g = &g;
  st.used.assign(g.n_nodes, false);
  for (std::size_t v = 0; v < g.n_nodes; ++v) {
    st.used[v] = true;
    st.nodes = {v};
    oracle_extend(st, v, 0, 1.0);
    st.used[v] = false;
  }
  return st.found ? st.best : 1.0;
}

// Random graph without same-segment cycles: per segment, edges respect a
// random node ordering, so the decoder's cycle-breaking stage never fires and
// the oracle compares the search itself.
inline sliceattrib::CausalGraph random_graph(sliceattrib::Rng& rng) {
  sliceattrib::CausalGraph g;
  g.n_nodes = 2 + rng.uniform_index(6);  // 2..7
  const std::size_t n_segments = 1 + rng.uniform_index(3);
  std::vector<std::vector<std::size_t>> order(n_segments);
  for (auto& perm : order) {
    perm.resize(g.n_nodes);
    for (std::size_t i = 0; i < g.n_nodes; ++i) perm[i] = i;
    for (std::size_t i = g.n_nodes; i > 1; --i)
      std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  }
  const std::size_t n_edges = 1 + rng.uniform_index(2 * g.n_nodes);
  for (std::size_t e = 0; e < n_edges; ++e) {
    const std::size_t seg = rng.uniform_index(n_segments);
    std::size_t a = rng.uniform_index(g.n_nodes);
    std::size_t b = rng.uniform_index(g.n_nodes);
    if (a == b) continue;
    if (order[seg][a] > order[seg][b]) std::swap(a, b);
    sliceattrib::PairTestResult r;
    r.source = a;
    r.target = b;
    r.segment = seg;
    r.gamma = 0.05 + 0.95 * rng.uniform();
    r.accepted = true;
    g.edges.push_back(r);
  }
  return g;
}

}  // namespace pathtest
