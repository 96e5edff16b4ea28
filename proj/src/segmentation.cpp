#include "sliceattrib/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sliceattrib {

namespace {

double gaussian_log_pdf(double x, const GaussianSpec& g) {
  const double d = x - g.mean;
  return -0.5 * (std::log(2.0 * M_PI * g.variance) + d * d / g.variance);
}

struct FirstAlarm {
  bool found = false;
  std::size_t alarm = 0;  // sample at which the statistic crossed h
  std::size_t onset = 0;  // estimated first sample of the new regime
};

// One-sided scan from `start` that stops at the first alarm.  The change
// onset is estimated as the sample after the statistic's last visit to zero
// (the maximum-likelihood change time for a CUSUM); reporting the onset
// instead of the alarm time keeps the detection delay out of the pre-change
// segment.
FirstAlarm scan_first(const std::vector<double>& series, std::size_t start,
                      const GaussianSpec& f0, const GaussianSpec& f1,
                      double kappa, double h) {
  FirstAlarm out;
  double s = 0.0;
  std::size_t last_zero_succ = start;
  for (std::size_t t = start; t < series.size(); ++t) {
    const double l =
        gaussian_log_pdf(series[t], f1) - gaussian_log_pdf(series[t], f0);
    s = std::max(0.0, s + l - kappa);
    if (s > h) {
      out.found = true;
      out.alarm = t;
      out.onset = std::min(last_zero_succ, t);
      return out;
    }
    if (s == 0.0) last_zero_succ = t + 1;
  }
  return out;
}

}  // namespace

std::vector<CusumAlarm> cusum_scan(const std::vector<double>& series,
                                   GaussianSpec f0, GaussianSpec f1,
                                   double kappa, double h) {
  if (!(f0.variance > 0.0) || !(f1.variance > 0.0))
    throw std::invalid_argument("cusum: variance must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("cusum: threshold must be positive");

  const double shift = f1.mean - f0.mean;
  std::vector<CusumAlarm> alarms;
  double s = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    const double l =
        gaussian_log_pdf(series[t], f1) - gaussian_log_pdf(series[t], f0);
    s = std::max(0.0, s + l - kappa);
    if (s > h) {
      alarms.push_back({t, s});
      s = 0.0;
      // Restart: the post-change model becomes the new pre-change model.
      f0 = f1;
      f1.mean += shift;
    }
  }
  return alarms;
}

std::vector<std::size_t> detect_changepoints(const std::vector<double>& series,
                                             const CusumConfig& cfg) {
  const std::size_t n = series.size();
  std::vector<std::size_t> cps;
  std::size_t pos = 0;
  // Sequential scheme: calibrate on a prefix of the not-yet-segmented tail,
  // two-sided scan to the first alarm, record the back-dated onset, then
  // recalibrate after the alarm and continue.  Recalibration re-anchors both
  // detectors at the post-change level, so a later reversal toward the
  // original level is still detected.
  while (true) {
    const std::size_t remaining = n - pos;
    const std::size_t calib = std::max<std::size_t>(
        8, static_cast<std::size_t>(cfg.calibration_fraction *
                                    static_cast<double>(remaining)));
    if (remaining < calib + 2) break;

    double mean = 0.0;
    for (std::size_t t = pos; t < pos + calib; ++t) mean += series[t];
    mean /= static_cast<double>(calib);
    // Long-run variance of the calibration prefix (Bartlett taper, L =
    // floor(calib^{1/3})).  The alarm threshold is calibrated against i.i.d.
    // input; serially dependent input would inflate the false-alarm rate
    // without this scaling, and on white input the estimate degenerates to
    // the sample variance.
    const std::size_t lag = static_cast<std::size_t>(
        std::floor(std::cbrt(static_cast<double>(calib))));
    std::vector<double> gamma(lag + 1, 0.0);
    for (std::size_t h = 0; h <= lag; ++h) {
      double s = 0.0;
      for (std::size_t t = pos; t + h < pos + calib; ++t)
        s += (series[t] - mean) * (series[t + h] - mean);
      gamma[h] = s / static_cast<double>(calib);
    }
    double var = gamma[0];
    for (std::size_t h = 1; h <= lag; ++h)
      var += 2.0 * gamma[h] *
             (1.0 - static_cast<double>(h) / static_cast<double>(lag + 1));
    // Negative autocorrelation can only lower the false-alarm rate; never
    // scale below the marginal variance.
    var = std::max(var, gamma[0]);
    if (!(var > 0.0)) break;

    const double shift = cfg.min_shift * std::sqrt(var);
    const GaussianSpec f0{mean, var};
    const FirstAlarm up =
        scan_first(series, pos, f0, {mean + shift, var}, cfg.kappa, cfg.h);
    const FirstAlarm down =
        scan_first(series, pos, f0, {mean - shift, var}, cfg.kappa, cfg.h);
    FirstAlarm best;
    if (up.found && (!down.found || up.alarm <= down.alarm))
      best = up;
    else if (down.found)
      best = down;
    if (!best.found) break;
    cps.push_back(best.onset);
    pos = best.alarm + 1;
  }
  return cps;
}

double mean_delay_bound(double h, double kl) {
  if (!(kl > 0.0)) throw std::invalid_argument("delay bound: KL must be positive");
  return h / kl;
}

double gaussian_kl(GaussianSpec from, GaussianSpec to) {
  const double d = from.mean - to.mean;
  return 0.5 * (std::log(to.variance / from.variance) +
                (from.variance + d * d) / to.variance - 1.0);
}

std::vector<SegmentValidity> build_segments(
    std::size_t horizon, const std::vector<std::size_t>& changepoints,
    std::size_t p, std::size_t q, std::size_t k,
    const BoundConstants& constants, double delta_max) {
  const std::size_t min_len = p + q + k + 2;
  std::vector<std::size_t> bounds{0};
  for (std::size_t cp : changepoints) {
    if (cp >= horizon)
      throw std::invalid_argument("changepoint beyond horizon");
    if (cp > bounds.back()) bounds.push_back(cp);
  }
  bounds.push_back(horizon);

  // Merge any too-short segment into its predecessor by dropping its left
  // boundary; a too-short leading segment merges forward instead.
  std::vector<std::size_t> kept{bounds.front()};
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    if (bounds[i] - kept.back() < min_len) {
      if (kept.size() == 1) continue;  // leading segment: absorb forward
      kept.pop_back();
    }
    kept.push_back(bounds[i]);
  }
  if (kept.size() > 2 && kept.back() - kept[kept.size() - 2] < min_len)
    kept.erase(kept.end() - 2);
  if (kept.size() < 2 || kept.back() != horizon) kept = {0, horizon};

  const double numer = constants.c1 * constants.kappa4 + constants.c3 * delta_max;
  std::vector<SegmentValidity> out;
  for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
    SegmentValidity sv;
    sv.segment.start = kept[i];
    sv.segment.end = kept[i + 1];
    sv.bound = numer / static_cast<double>(sv.segment.length());
    out.push_back(sv);
  }
  return out;
}

std::size_t min_segment_length(const BoundConstants& constants,
                               double delta_max, double level) {
  if (!(level > 0.0)) throw std::invalid_argument("level must be positive");
  const double numer = constants.c1 * constants.kappa4 + constants.c3 * delta_max;
  return static_cast<std::size_t>(std::ceil(numer / level));
}

}  // namespace sliceattrib
