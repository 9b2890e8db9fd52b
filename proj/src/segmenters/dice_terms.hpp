#pragma once

#include "skillroute/segmenters.hpp"

namespace skillroute::detail {

/// Soft DSC per class and the coefficients of
/// d loss / d p[c] = a[c] * [g == c] + b[c], from the masked dice sums.
struct DiceTerms {
  ClassRow dsc{};
  ClassRow a{};
  ClassRow b{};
  double loss = 0;
};

DiceTerms dice_terms(const kernels::DiceSums& s, double epsilon, bool include_background);

}  // namespace skillroute::detail
