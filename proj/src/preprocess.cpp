#include "skillroute/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace skillroute {

MaskedVoxels apply_mask(const Volume& v, const MaskVolume& m) {
  require_same_dims(v, m, "apply_mask");
  MaskedVoxels out;
  out.source_dims = v.dims();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) out.values.push_back(v[i]);
  }
  if (out.values.empty()) throw Error(ErrorCode::EmptyMask, "mask has no true voxels");
  return out;
}

double sorted_percentile(const std::vector<double>& sorted, double percent) {
  if (sorted.empty()) throw Error(ErrorCode::EmptyInput, "percentile of an empty sequence");
  const double pos = std::clamp(percent, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(pos));
  const std::size_t above = std::min(below + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return sorted[below] + frac * (sorted[above] - sorted[below]);
}

std::pair<Volume, NormalizationRecord> normalize(const Volume& v, const MaskVolume& m,
                                                 const NormalizationMode& mode) {
  const MaskedVoxels masked = apply_mask(v, m);
  NormalizationRecord rec;
  rec.mode = mode;
  if (mode.kind == NormalizationMode::Kind::MinMax) {
    const auto [mn, mx] = std::minmax_element(masked.values.begin(), masked.values.end());
    rec.lo = *mn;
    rec.hi = *mx;
  } else {
    if (!(mode.p_lo >= 0 && mode.p_lo < mode.p_hi && mode.p_hi <= 100)) {
      throw Error(ErrorCode::BadConfig, "percentile bounds must satisfy 0 <= lo < hi <= 100");
    }
    std::vector<double> sorted = masked.values;
    std::sort(sorted.begin(), sorted.end());
    rec.lo = sorted_percentile(sorted, mode.p_lo);
    rec.hi = sorted_percentile(sorted, mode.p_hi);
  }
  if (!(rec.hi > rec.lo)) {
    throw Error(ErrorCode::ConstantIntensity, "masked intensities span no range");
  }

  // Divide rather than multiply by a reciprocal so the maximum maps to exactly 1.
  const double range = rec.hi - rec.lo;
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) out[i] = std::clamp((v[i] - rec.lo) / range, 0.0, 1.0);
  }
  return {Volume(v.geometry(), std::move(out)), rec};
}

}  // namespace skillroute
