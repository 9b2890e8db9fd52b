#pragma once

#include <utility>
#include <vector>

#include "skillroute/grid.hpp"

namespace skillroute {

/// Intensities at mask-true voxels, in grid index order.
struct MaskedVoxels {
  std::vector<double> values;
  Dims source_dims;
};

struct NormalizationMode {
  enum class Kind { MinMax, Percentile };
  Kind kind = Kind::MinMax;
  double p_lo = 0.5;   // percent, percentile mode only
  double p_hi = 99.5;

  static NormalizationMode minmax() { return {}; }
  static NormalizationMode percentile(double lo = 0.5, double hi = 99.5) {
    return {Kind::Percentile, lo, hi};
  }
  bool operator==(const NormalizationMode&) const = default;
};

struct NormalizationRecord {
  double lo = 0;  // maps to 0
  double hi = 1;  // maps to 1
  NormalizationMode mode;
  bool operator==(const NormalizationRecord&) const = default;
};

MaskedVoxels apply_mask(const Volume& v, const MaskVolume& m);

/// Linear map (in - lo) / (hi - lo) clamped to [0,1] inside the mask; voxels
/// outside the mask are set to 0. lo/hi come from masked intensities only.
std::pair<Volume, NormalizationRecord> normalize(const Volume& v, const MaskVolume& m,
                                                 const NormalizationMode& mode = {});

/// Linear-interpolated percentile (0..100) of an already sorted sequence.
double sorted_percentile(const std::vector<double>& sorted, double percent);

}  // namespace skillroute
