#include "sliceattrib/core.hpp"

#include <stdexcept>
#include <string>

namespace sliceattrib {

TelemetryWindow TelemetryWindow::zeros(std::size_t n, std::size_t k,
                                       std::size_t t, std::size_t d,
                                       double period) {
  TelemetryWindow w;
  w.n_slices = n;
  w.n_resources = k;
  w.horizon = t;
  w.n_metrics = d;
  w.sample_period = period;
  w.telemetry.assign(t * n * d, 0.0);
  w.allocation.assign(t * n * k, 0.0);
  w.utilization.assign(t * k, 0.0);
  return w;
}

ModelParams ModelParams::defaults(std::size_t n_resources) {
  ModelParams p;
  if (n_resources == 3) {
    p.w = {0.45, 0.31, 0.24};
  } else {
    p.w.assign(n_resources, 1.0 / static_cast<double>(n_resources));
  }
  p.tau.assign(n_resources, 0.7);
  return p;
}

namespace {

constexpr double kSimplexTol = 1e-9;

void check_unit_interval(const std::vector<double>& v, const char* field,
                         std::vector<Violation>& out, std::size_t limit = 8) {
  std::size_t reported = 0;
  for (std::size_t idx = 0; idx < v.size() && reported < limit; ++idx) {
    if (v[idx] < 0.0 || v[idx] > 1.0) {
      out.push_back({field, "flat:" + std::to_string(idx), v[idx],
                     std::string(field) + " entry outside [0,1]"});
      ++reported;
    }
  }
}

}  // namespace

std::vector<Violation> validate_window(const TelemetryWindow& w) {
  std::vector<Violation> out;
  if (w.horizon < 1)
    out.push_back({"horizon", "", static_cast<double>(w.horizon),
                   "horizon must be >= 1"});
  if (w.n_slices < 2)
    out.push_back({"slices", "", static_cast<double>(w.n_slices),
                   "slice count must be >= 2"});
  if (w.n_resources < 1)
    out.push_back({"resources", "", static_cast<double>(w.n_resources),
                   "resource count must be >= 1"});
  if (w.n_metrics < 1)
    out.push_back({"metrics", "", static_cast<double>(w.n_metrics),
                   "metric count must be >= 1"});

  const std::size_t want_tele = w.horizon * w.n_slices * w.n_metrics;
  const std::size_t want_alloc = w.horizon * w.n_slices * w.n_resources;
  const std::size_t want_util = w.horizon * w.n_resources;
  if (w.telemetry.size() != want_tele)
    out.push_back({"telemetry", "", static_cast<double>(w.telemetry.size()),
                   "telemetry size does not match T*N*d"});
  if (w.allocation.size() != want_alloc)
    out.push_back({"allocation", "", static_cast<double>(w.allocation.size()),
                   "allocation size does not match T*N*K"});
  if (w.utilization.size() != want_util)
    out.push_back({"utilization", "", static_cast<double>(w.utilization.size()),
                   "utilization size does not match T*K"});
  if (!out.empty() && (w.telemetry.size() != want_tele ||
                       w.allocation.size() != want_alloc ||
                       w.utilization.size() != want_util))
    return out;  // shape errors make per-entry checks meaningless

  check_unit_interval(w.allocation, "allocation", out);
  check_unit_interval(w.utilization, "utilization", out);

  // Per-resource allocation simplex constraint.
  for (std::size_t t = 0; t < w.horizon; ++t) {
    for (std::size_t k = 0; k < w.n_resources; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < w.n_slices; ++i) s += w.alloc(t, i, k);
      if (s > 1.0 + kSimplexTol) {
        out.push_back({"allocation",
                       "t=" + std::to_string(t) + ",k=" + std::to_string(k), s,
                       "allocation column sum exceeds 1"});
        if (out.size() > 64) return out;  // cap the report
      }
    }
  }
  return out;
}

PairSeries extract_pair(const TelemetryWindow& w, std::size_t i, std::size_t j,
                        std::size_t coord) {
  if (i == j) throw std::invalid_argument("self-pair rejected");
  if (i >= w.n_slices || j >= w.n_slices)
    throw std::out_of_range("slice index out of range: i=" + std::to_string(i) +
                            " j=" + std::to_string(j) +
                            " N=" + std::to_string(w.n_slices));
  if (coord >= w.n_metrics)
    throw std::out_of_range("metric coordinate out of range: " +
                            std::to_string(coord) +
                            " >= d=" + std::to_string(w.n_metrics));
  PairSeries s;
  s.n_resources = w.n_resources;
  s.x.resize(w.horizon);
  s.y.resize(w.horizon);
  s.z.resize(w.horizon * w.n_resources);
  for (std::size_t t = 0; t < w.horizon; ++t) {
    s.x[t] = w.tele(t, i, coord);
    s.y[t] = w.tele(t, j, coord);
    for (std::size_t k = 0; k < w.n_resources; ++k)
      s.z[t * w.n_resources + k] = w.util(t, k);
  }
  return s;
}

}  // namespace sliceattrib
