#include "skillroute/histo_judge.hpp"

#include <algorithm>
#include <cmath>

#include "skillroute/kernels.hpp"

namespace skillroute {

std::string_view to_string(Target t) {
  return t == Target::SkilledA ? "SkilledA" : "SkilledB";
}

void JudgementConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::BadConfig, msg); };
  if (bin_count < 2) fail("bin count must be >= 2");
  if (smoothing_window < 1 || smoothing_window % 2 == 0) fail("smoothing window must be odd and >= 1");
  if (smoothing_window > bin_count) fail("smoothing window exceeds bin count");
  if (!(min_prominence >= 0)) fail("prominence ratio must be >= 0");
  if (!(height_ratio > 0 && height_ratio <= 1)) fail("height ratio must be in (0,1]");
  if (!(position_ratio > 0 && position_ratio <= 1)) fail("position ratio must be in (0,1]");
  if (separation && !(*separation >= 0)) fail("separation must be >= 0");
}

Histogram build_histogram(const MaskedVoxels& mv, std::size_t bins, double lo, double hi) {
  if (mv.values.empty()) throw Error(ErrorCode::EmptyInput, "no voxels to bin");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::BadRange, "histogram range must satisfy hi > lo");
  }
  if (bins == 0) throw Error(ErrorCode::BadConfig, "bin count must be positive");
  const auto raw = kernels::omp::bin_counts(mv.values, lo, hi, bins);
  Histogram h;
  h.bin_count = bins;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(raw.begin(), raw.end());
  h.total = static_cast<double>(mv.values.size());
  return h;
}

Histogram smooth_histogram(const Histogram& h, std::size_t window) {
  if (window < 1 || window % 2 == 0 || window > h.bin_count) {
    throw Error(ErrorCode::BadWindow, "window must be odd and within [1, bins]");
  }
  Histogram out = h;
  out.smoothed = true;
  const std::size_t half = window / 2;
  const std::size_t n = h.counts.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t b = k >= half ? k - half : 0;
    const std::size_t e = std::min(n - 1, k + half);
    double sum = 0;
    for (std::size_t j = b; j <= e; ++j) sum += h.counts[j];
    out.counts[k] = sum / static_cast<double>(e - b + 1);
  }
  return out;
}

namespace {

// Height above the higher of the two lowest points reached before meeting a
// strictly taller bin (or the end of the histogram) on each side. A peak that
// sits on the first or last bin has nothing beyond it, so only the inner side
// sets its base; otherwise tissue modes at the intensity extremes would always
// score zero.
double prominence(const std::vector<double>& c, std::size_t k) {
  const double h = c[k];
  const bool at_left_edge = k == 0;
  const bool at_right_edge = k + 1 == c.size();
  if (at_left_edge && at_right_edge) return h;

  double left_min = h;
  for (std::size_t j = k; j-- > 0;) {
    if (c[j] > h) break;
    left_min = std::min(left_min, c[j]);
  }
  double right_min = h;
  for (std::size_t j = k + 1; j < c.size(); ++j) {
    if (c[j] > h) break;
    right_min = std::min(right_min, c[j]);
  }
  if (at_left_edge) return h - right_min;
  if (at_right_edge) return h - left_min;
  return h - std::max(left_min, right_min);
}

}  // namespace

PeakSet detect_peaks(const Histogram& h, double prominence_ratio) {
  PeakSet ps;
  const auto& c = h.counts;
  const std::size_t n = c.size();
  if (n == 0) return ps;
  const double tallest = *std::max_element(c.begin(), c.end());
  const double floor = prominence_ratio * tallest;

  std::size_t k = 0;
  while (k < n) {
    // Treat a run of equal bins as one candidate located at its leftmost bin.
    std::size_t end = k;
    while (end + 1 < n && c[end + 1] == c[k]) ++end;
    const bool rises = k == 0 || c[k] > c[k - 1];
    const bool falls = end == n - 1 || c[end] > c[end + 1];
    if (rises && falls && c[k] > 0 && prominence(c, k) >= floor) {
      ps.peaks.push_back({k, c[k]});
    }
    k = end + 1;
  }
  return ps;
}

RoutingDecision judge(const PeakSet& ps, const JudgementConfig& cfg) {
  cfg.validate();
  RoutingDecision d;
  d.peakset = ps;
  d.degenerate = ps.n() < 2;
  if (d.degenerate) {
    d.target = Target::SkilledB;
    return d;
  }
  const Peak& prev = ps.peaks[ps.n() - 2];
  const Peak& last = ps.peaks[ps.n() - 1];
  const double x_range = static_cast<double>(cfg.bin_count);

  d.separation.lhs = static_cast<double>(last.x) - static_cast<double>(prev.x);
  d.separation.rhs = cfg.effective_separation();
  d.separation.passed = d.separation.lhs > d.separation.rhs;

  d.height.lhs = last.y;
  d.height.rhs = cfg.height_ratio * prev.y;
  d.height.passed = d.height.lhs >= d.height.rhs;

  d.position.lhs = static_cast<double>(last.x);
  d.position.rhs = cfg.position_ratio * x_range;
  d.position.passed = d.position.lhs <= d.position.rhs;

  const bool all = d.separation.passed && d.height.passed && d.position.passed;
  d.target = all ? Target::SkilledA : Target::SkilledB;
  return d;
}

RoutingDecision judge_volume(const Volume& normalized, const MaskVolume& m,
                             const JudgementConfig& cfg) {
  cfg.validate();
  const MaskedVoxels mv = apply_mask(normalized, m);
  const Histogram raw = build_histogram(mv, cfg.bin_count, 0.0, 1.0);
  const Histogram smooth = smooth_histogram(raw, cfg.smoothing_window);
  return judge(detect_peaks(smooth, cfg.min_prominence), cfg);
}

}  // namespace skillroute
