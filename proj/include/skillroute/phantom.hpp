#pragma once

#include <array>
#include <cstdint>

#include "skillroute/grid.hpp"

namespace skillroute {

/// Synthetic brain: an ellipsoidal mask split into concentric shells
/// (CSF outside, GM in between, WM core) with Gaussian tissue intensities and
/// an optional multiplicative bias field.
struct PhantomSpec {
  Dims dims{32, 32, 32};
  Spacing spacing{};
  std::array<double, 3> tissue_means{0.2, 0.5, 0.8};   // CSF, GM, WM
  std::array<double, 3> tissue_stddevs{0.05, 0.05, 0.05};
  /// Relative tissue shares of the mask; must sum to <= 1. The shares are
  /// rescaled by their sum, so (0.2, 0.5, 0.3) gives exactly those fractions.
  std::array<double, 3> tissue_fractions{0.2, 0.5, 0.3};
  double bias_amplitude = 0.0;  // bias field spans [1 - a, 1 + a]; 0 disables
  std::uint64_t seed = 1;

  /// Throws BadSpec when the spec violates its invariants.
  void validate() const;
  bool operator==(const PhantomSpec&) const = default;
};

struct Phantom {
  Volume volume;
  LabelVolume labels;
  MaskVolume mask;
};

Phantom generate_phantom(const PhantomSpec& spec);

}  // namespace skillroute
