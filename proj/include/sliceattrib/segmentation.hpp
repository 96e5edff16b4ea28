#pragma once

#include <cstddef>
#include <vector>

#include "sliceattrib/core.hpp"

namespace sliceattrib {

// Gaussian model for the one-sided CUSUM likelihood ratio.
struct GaussianSpec {
  double mean = 0.0;
  double variance = 1.0;
};

struct CusumAlarm {
  std::size_t time = 0;
  double score = 0.0;
};

// One-sided CUSUM scan with log-likelihood-ratio increments
// l_t = log f1(x_t) - log f0(x_t):  S_t = max(0, S_{t-1} + l_t - kappa),
// alarm at the first S_t > h.  After each alarm S resets to 0 and the
// post-change model becomes the new pre-change model (restart rule).
std::vector<CusumAlarm> cusum_scan(const std::vector<double>& series,
                                   GaussianSpec f0, GaussianSpec f1,
                                   double kappa, double h);

// Two-sided detector: one-sided scans against +shift and -shift alternatives,
// merged and deduplicated in time order.  f0 is estimated from the leading
// calibration fraction of the series.
struct CusumConfig {
  double h = 4.6;
  double min_shift = 2.0;  // alternative mean shift, in sigma units
  double calibration_fraction = 0.2;
  // Extra drift on top of the LLR's built-in midpoint.  Calibrated so the
  // two-sided detector's false-alarm rate on a stationary 300-sample window
  // is ~5% at h = 4.6 with min_shift = 2.
  double kappa = 1.65;
};

std::vector<std::size_t> detect_changepoints(const std::vector<double>& series,
                                             const CusumConfig& cfg);

// Wald bound on mean detection delay: h / KL(f1 || f0).
double mean_delay_bound(double h, double kl);

double gaussian_kl(GaussianSpec from, GaussianSpec to);

struct SegmentValidity {
  Segment segment;
  double bound = 0.0;  // (C1*kappa4 + C3*delta_max) / T_m
};

// Half-open segments from sorted changepoints; segments shorter than the
// regression minimum p+q+K+2 are merged with their predecessor.
std::vector<SegmentValidity> build_segments(std::size_t horizon,
                                            const std::vector<std::size_t>& changepoints,
                                            std::size_t p, std::size_t q,
                                            std::size_t k,
                                            const BoundConstants& constants,
                                            double delta_max = 4.0);

// Smallest segment length making the validity bound <= level.
std::size_t min_segment_length(const BoundConstants& constants,
                               double delta_max, double level);

}  // namespace sliceattrib
