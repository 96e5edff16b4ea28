#include "sliceattrib/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "sliceattrib/fdist.hpp"
#include "sliceattrib/granger.hpp"
#include "sliceattrib/learning.hpp"

namespace sliceattrib {

std::vector<double> normalize_f(const std::vector<double>& f_values) {
  std::vector<double> out(f_values.size(), 0.5);
  if (f_values.empty()) return out;
  const auto [mn, mx] = std::minmax_element(f_values.begin(), f_values.end());
  if (*mx - *mn < 1e-300) return out;  // degenerate: all equal map to 0.5
  for (std::size_t i = 0; i < f_values.size(); ++i)
    out[i] = (f_values[i] - *mn) / (*mx - *mn);
  return out;
}

BhResult bh_adjust(const std::vector<double>& p_values, double alpha) {
  const std::size_t m = p_values.size();
  BhResult r;
  r.adjusted.assign(m, 1.0);
  r.rejected.assign(m, false);
  if (m == 0) return r;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });

  double running = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const double candidate =
        static_cast<double>(m) * p_values[order[k]] / static_cast<double>(k + 1);
    running = std::min(running, std::min(1.0, candidate));
    r.adjusted[order[k]] = running;
  }
  for (std::size_t i = 0; i < m; ++i) r.rejected[i] = r.adjusted[i] < alpha;
  return r;
}

double simes_fkg_bound(const std::vector<std::size_t>& null_ranks,
                       std::size_t m, std::size_t m0, double alpha) {
  double prod = 1.0;
  for (std::size_t rank : null_ranks) {
    if (rank < 1 || rank > m)
      throw std::invalid_argument("null rank out of range");
    const double term = alpha * static_cast<double>(m0) /
                        (static_cast<double>(m) * static_cast<double>(rank));
    if (term >= 1.0) throw std::runtime_error("bound vacuous");
    prod *= 1.0 - term;
  }
  return 1.0 - prod;
}

double simes_union_bound(const std::vector<std::size_t>& null_ranks,
                         std::size_t m, std::size_t m0, double alpha) {
  double sum = 0.0;
  for (std::size_t rank : null_ranks)
    sum += alpha * static_cast<double>(m0) /
           (static_cast<double>(m) * static_cast<double>(rank));
  return sum;
}

namespace {

// Removes same-segment cycles, dropping the weakest edge of each cycle found.
void break_cycles(std::vector<PairTestResult>& edges, std::size_t n_nodes,
                  std::vector<std::string>* warnings) {
  std::vector<std::size_t> segments;
  for (const auto& e : edges) segments.push_back(e.segment);
  std::sort(segments.begin(), segments.end());
  segments.erase(std::unique(segments.begin(), segments.end()), segments.end());

  for (std::size_t seg : segments) {
    for (;;) {
      // adjacency over this segment's surviving edges
      std::vector<std::vector<std::size_t>> adj(n_nodes);  // edge indices
      for (std::size_t e = 0; e < edges.size(); ++e)
        if (edges[e].segment == seg) adj[edges[e].source].push_back(e);

      // iterative DFS cycle search
      std::vector<int> color(n_nodes, 0);
      std::vector<std::size_t> parent_edge(n_nodes, SIZE_MAX);
      std::vector<std::size_t> cycle_edges;
      std::function<bool(std::size_t)> dfs = [&](std::size_t v) -> bool {
        color[v] = 1;
        for (std::size_t e : adj[v]) {
          const std::size_t to = edges[e].target;
          if (color[to] == 1) {
            // unwind v -> ... -> to
            cycle_edges.push_back(e);
            std::size_t cur = v;
            while (cur != to) {
              cycle_edges.push_back(parent_edge[cur]);
              cur = edges[parent_edge[cur]].source;
            }
            return true;
          }
          if (color[to] == 0) {
            parent_edge[to] = e;
            if (dfs(to)) return true;
          }
        }
        color[v] = 2;
        return false;
      };

      bool found = false;
      for (std::size_t v = 0; v < n_nodes && !found; ++v)
        if (color[v] == 0) found = dfs(v);
      if (!found) break;

      const std::size_t victim = *std::min_element(
          cycle_edges.begin(), cycle_edges.end(),
          [&](std::size_t a, std::size_t b) {
            return edges[a].gamma < edges[b].gamma;
          });
      if (warnings)
        warnings->push_back("cycle in segment " + std::to_string(seg) +
                            ": removed edge " +
                            std::to_string(edges[victim].source) + "->" +
                            std::to_string(edges[victim].target) + " (gamma " +
                            std::to_string(edges[victim].gamma) + ")");
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(victim));
    }
  }
}

struct PathSearch {
  const std::vector<PairTestResult>* edges = nullptr;
  std::size_t n_nodes = 0;
  std::vector<std::vector<std::size_t>> out_edges;  // by source node
  std::vector<std::vector<std::size_t>> in_edges;   // by target node

  std::vector<std::size_t> best_nodes;
  std::vector<std::size_t> best_edges;
  double best_log = -1e300;
  bool have_best = false;

  std::vector<std::size_t> cur_nodes;
  std::vector<std::size_t> cur_edges;
  std::vector<bool> visited;

  bool head_maximal() const {
    const std::size_t head = cur_nodes.front();
    const std::size_t first_seg = (*edges)[cur_edges.front()].segment;
    for (std::size_t e : in_edges[head]) {
      if ((*edges)[e].segment > first_seg) continue;
      if (!visited[(*edges)[e].source]) return false;
    }
    return true;
  }

  void consider() {
    if (cur_edges.empty() || !head_maximal()) return;
    double lg = 0.0;
    for (std::size_t e : cur_edges) lg += std::log((*edges)[e].gamma);
    if (!have_best || lg > best_log + 1e-12 ||
        (std::fabs(lg - best_log) <= 1e-12 && cur_nodes < best_nodes)) {
      best_log = lg;
      best_nodes = cur_nodes;
      best_edges = cur_edges;
      have_best = true;
    }
  }

  void extend(std::size_t node, std::size_t min_segment) {
    bool extended = false;
    for (std::size_t e : out_edges[node]) {
      const PairTestResult& edge = (*edges)[e];
      if (edge.segment < min_segment || visited[edge.target]) continue;
      extended = true;
      visited[edge.target] = true;
      cur_nodes.push_back(edge.target);
      cur_edges.push_back(e);
      extend(edge.target, edge.segment);
      cur_edges.pop_back();
      cur_nodes.pop_back();
      visited[edge.target] = false;
    }
    if (!extended) consider();  // tail-maximal
  }
};

}  // namespace

AttributionPath viterbi_decode(const CausalGraph& g,
                               std::vector<std::string>* warnings) {
  AttributionPath path;
  path.product_score = 1.0;
  if (g.edges.empty()) return path;
  for (const auto& e : g.edges)
    if (!(e.gamma > 0.0) || e.gamma > 1.0 + 1e-12)
      throw std::invalid_argument("edge strengths must lie in (0,1]");

  std::vector<PairTestResult> edges = g.edges;
  break_cycles(edges, g.n_nodes, warnings);
  if (edges.empty()) return path;

  PathSearch search;
  search.edges = &edges;
  search.n_nodes = g.n_nodes;
  search.out_edges.resize(g.n_nodes);
  search.in_edges.resize(g.n_nodes);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    search.out_edges[edges[e].source].push_back(e);
    search.in_edges[edges[e].target].push_back(e);
  }
  // Deterministic exploration order: by target id, then segment.
  for (auto& v : search.out_edges)
    std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) {
      if (edges[a].target != edges[b].target)
        return edges[a].target < edges[b].target;
      return edges[a].segment < edges[b].segment;
    });

  search.visited.assign(g.n_nodes, false);
  for (std::size_t v = 0; v < g.n_nodes; ++v) {
    if (search.out_edges[v].empty()) continue;
    search.visited[v] = true;
    search.cur_nodes = {v};
    search.extend(v, 0);
    search.visited[v] = false;
  }
  if (!search.have_best) return path;

  // Rebuild the winning hop sequence with its edge metadata.  The edge
  // sequence itself is replayed (not re-derived from the node sequence):
  // with parallel edges a greedy max-gamma re-pick could swap in an edge the
  // search never scored.
  path.hops.push_back({search.best_nodes[0], 0, 1.0, 0.0, 0.0});
  double product = 1.0;
  for (std::size_t l = 0; l < search.best_edges.size(); ++l) {
    const PairTestResult& chosen = edges[search.best_edges[l]];
    product *= chosen.gamma;
    path.hops.push_back(
        {chosen.target, chosen.segment, chosen.gamma, chosen.p_adjusted, 0.0});
  }
  path.product_score = product;
  return path;
}

namespace {

double pair_rho(const TelemetryWindow& w, std::size_t i, std::size_t j,
                const Segment& seg, const ModelParams& params,
                ContentionRule rule, bool uniform_weights) {
  const std::size_t k = w.n_resources;
  double total = 0.0;
  for (std::size_t t = seg.start; t < seg.end; ++t) {
    for (std::size_t r = 0; r < k; ++r) {
      const double weight =
          uniform_weights ? 1.0 / static_cast<double>(k) : params.w[r];
      const double ai = w.alloc(t, i, r);
      const double aj = w.alloc(t, j, r);
      double coupling;
      switch (rule) {
        case ContentionRule::kSigmoidProduct: coupling = ai * aj; break;
        case ContentionRule::kMinSigmoid: coupling = std::min(ai, aj); break;
        default: coupling = ai + aj; break;
      }
      total += weight * coupling * logistic(w.util(t, r) - params.tau[r]);
    }
  }
  return total / static_cast<double>(seg.length());
}

PairSeries extract_segment_pair(const TelemetryWindow& w, std::size_t i,
                                std::size_t j, std::size_t coord,
                                const Segment& seg) {
  PairSeries s;
  s.n_resources = w.n_resources;
  const std::size_t len = seg.length();
  s.x.resize(len);
  s.y.resize(len);
  s.z.resize(len * w.n_resources);
  for (std::size_t t = 0; t < len; ++t) {
    s.x[t] = w.tele(seg.start + t, i, coord);
    s.y[t] = w.tele(seg.start + t, j, coord);
    for (std::size_t r = 0; r < w.n_resources; ++r)
      s.z[t * w.n_resources + r] = w.util(seg.start + t, r);
  }
  return s;
}

}  // namespace

AttributionReport attribute(const TelemetryWindow& window,
                            const AttributionOptions& opts) {
  AttributionReport rep;
  // Shape violations are fatal; value-range violations (possible on noisy or
  // adversarially perturbed inputs, which are expected downstream states) are
  // surfaced as warnings and processing continues.
  for (const auto& v : validate_window(window)) {
    const bool range_issue = v.message.find("outside [0,1]") != std::string::npos ||
                             v.message.find("column sum") != std::string::npos;
    if (!range_issue)
      throw std::invalid_argument("invalid window: " + v.message);
    rep.warnings.push_back("window: " + v.message + " (" + v.index + ")");
  }
  const ModelParams& mp = opts.params;
  const std::size_t n = window.n_slices;
  const std::size_t k = window.n_resources;

  // Segmentation scans one representative series: the cross-slice mean.
  // Regime changes are window-wide level shifts shared by every slice, so
  // they survive averaging unattenuated while each slice's idiosyncratic
  // dynamics average down; a per-slice union would also multiply the
  // detector's per-window false-alarm rate by the slice count.
  std::vector<std::size_t> changepoints;
  if (opts.use_segmentation) {
    std::vector<double> series(window.horizon);
    for (std::size_t t = 0; t < window.horizon; ++t) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += window.tele(t, i, opts.coord);
      series[t] = s / static_cast<double>(n);
    }
    changepoints = detect_changepoints(series, opts.cusum);
  }
  rep.segments = build_segments(window.horizon, changepoints, mp.p, mp.q, k,
                                opts.constants);

  bool any_fit = false;
  for (std::size_t seg_idx = 0; seg_idx < rep.segments.size(); ++seg_idx) {
    const Segment& seg = rep.segments[seg_idx].segment;

    std::vector<PairTestResult> seg_results;
    std::vector<double> f_vals;
    std::vector<double> p_vals;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        PairTestResult res;
        res.source = i;
        res.target = j;
        res.segment = seg_idx;
        try {
          const PairSeries s =
              extract_segment_pair(window, i, j, opts.coord, seg);
          const PairFit fit = fit_models(s, mp.p, mp.q, opts.condition_on_z);
          const RawFStat raw =
              f_statistic(fit, mp.p, mp.q, k, opts.condition_on_z);
          if (opts.use_correction) {
            const AutocovEstimate rac =
                estimate_autocov(fit.unrestricted.residuals);
            const AutocovEstimate ac = AutocovEstimate::geometric(
                rac.gamma[0], opts.correction_decay,
                static_cast<std::size_t>(fit.unrestricted.residuals.size()));
            const CorrectedFStat cf =
                corrected_f(raw, ac, opts.correction_op);
            res.f_tilde = cf.f_tilde;
            res.p_value = cf.p_value;
          } else {
            res.f_tilde = raw.f;
            res.p_value = f_sf(raw.f, static_cast<double>(raw.q_num),
                               static_cast<double>(raw.den_dof));
          }
        } catch (const std::exception& ex) {
          rep.warnings.push_back("pair " + std::to_string(i) + "->" +
                                 std::to_string(j) + " segment " +
                                 std::to_string(seg_idx) + " skipped: " +
                                 ex.what());
          continue;
        }
        res.rho = pair_rho(window, i, j, seg, mp, opts.rule,
                           opts.uniform_weights);
        seg_results.push_back(res);
        f_vals.push_back(res.f_tilde);
        p_vals.push_back(res.p_value);
      }
    }
    if (seg_results.empty()) continue;
    any_fit = true;

    const std::vector<double> phi = normalize_f(f_vals);
    const BhResult bh = bh_adjust(p_vals, mp.alpha);
    for (std::size_t idx = 0; idx < seg_results.size(); ++idx) {
      PairTestResult& res = seg_results[idx];
      res.gamma = mp.omega1 * phi[idx] + mp.omega2 * res.rho;
      res.p_adjusted = bh.adjusted[idx];
      res.accepted = res.gamma > mp.tau_causal && res.p_adjusted < mp.alpha;
      rep.all_results.push_back(res);
      if (res.accepted) rep.graph.edges.push_back(res);
    }
  }
  if (!any_fit) throw std::runtime_error("no admissible edges");

  rep.graph.n_nodes = n;
  rep.path = viterbi_decode(rep.graph, &rep.warnings);

  // Hop times: segment start samples; reported parameter-error margin.
  double w_max = 0.0;
  for (double v : mp.w) w_max = std::max(w_max, v);
  const double t_eff = effective_sample_size(
      static_cast<double>(window.horizon), opts.constants.c_beta,
      opts.constants.beta_mix);
  rep.gamma_margin = lipschitz_gamma(mp.omega2, n, k, w_max) *
                     convergence_radius(t_eff, k, mp.lambda, 0.05);
  for (std::size_t l = 0; l < rep.path.hops.size(); ++l) {
    PathHop& hop = rep.path.hops[l];
    if (l > 0) hop.gamma_margin = rep.gamma_margin;
    hop.time = rep.segments[hop.time].segment.start;
  }

  rep.ks_bound_corrected =
      ks_bound_corrected(window.horizon, opts.constants, mp.p, mp.q, k);
  rep.ks_bound_iid = ks_bound_iid_calibrated(window.horizon, opts.constants);
  return rep;
}

}  // namespace sliceattrib
