#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "skillroute/grid.hpp"
#include "skillroute/preprocess.hpp"

namespace skillroute {

struct Histogram {
  std::size_t bin_count = 0;
  double lo = 0;
  double hi = 1;
  std::vector<double> counts;
  bool smoothed = false;
  double total = 0;  // sum of counts when the raw histogram was built

  bool operator==(const Histogram&) const = default;
};

struct Peak {
  std::size_t x = 0;  // bin index
  double y = 0;       // count at that bin
  bool operator==(const Peak&) const = default;
};

/// Peaks sorted by strictly increasing bin index.
struct PeakSet {
  std::vector<Peak> peaks;
  std::size_t n() const { return peaks.size(); }
  bool operator==(const PeakSet&) const = default;
};

struct JudgementConfig {
  std::size_t bin_count = 128;
  std::size_t smoothing_window = 5;
  double min_prominence = 0.01;  // fraction of the tallest bin
  double height_ratio = 0.8;
  double position_ratio = 0.8;
  /// Minimum separation of the last two peaks, in bins. Unset means 1/bins.
  std::optional<double> separation;

  double effective_separation() const {
    return separation.value_or(1.0 / static_cast<double>(bin_count));
  }
  /// Throws BadConfig when any field is outside its valid range.
  void validate() const;
  bool operator==(const JudgementConfig&) const = default;
};

enum class Target { SkilledA, SkilledB };
std::string_view to_string(Target t);

struct RuleEvaluation {
  bool passed = false;
  double lhs = 0;
  double rhs = 0;
  bool operator==(const RuleEvaluation&) const = default;
};

struct RoutingDecision {
  Target target = Target::SkilledB;
  RuleEvaluation separation;  // x_n - x_{n-1} > tau
  RuleEvaluation height;      // y_n >= r_h * y_{n-1}
  RuleEvaluation position;    // x_n <= r_p * B
  PeakSet peakset;
  bool degenerate = true;     // fewer than two peaks

  bool operator==(const RoutingDecision&) const = default;
};

Histogram build_histogram(const MaskedVoxels& mv, std::size_t bins, double lo, double hi);
Histogram smooth_histogram(const Histogram& h, std::size_t window);
PeakSet detect_peaks(const Histogram& h, double prominence_ratio);
RoutingDecision judge(const PeakSet& ps, const JudgementConfig& cfg);

/// Histogram over [0,1] of the masked voxels of an already normalized volume,
/// smoothed, peak-detected and judged.
RoutingDecision judge_volume(const Volume& normalized, const MaskVolume& m,
                             const JudgementConfig& cfg);

}  // namespace skillroute
