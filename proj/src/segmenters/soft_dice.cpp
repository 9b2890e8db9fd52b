#include <cmath>

#include "dice_terms.hpp"

namespace skillroute {

namespace detail {

DiceTerms dice_terms(const kernels::DiceSums& s, double epsilon, bool include_background) {
  DiceTerms t;
  const int first = include_background ? 0 : 1;
  double sum = 0;
  for (int c = first; c < kClassCount; ++c) {
    const double num = 2.0 * s.intersection[c] + epsilon;
    const double den = s.predicted[c] + s.truth[c] + epsilon;
    t.dsc[c] = num / den;
    t.a[c] = -2.0 / den;
    t.b[c] = num / (den * den);
    sum += t.dsc[c];
  }
  t.loss = static_cast<double>(kClassCount - first) - sum;
  return t;
}

}  // namespace detail

SoftDiceResult soft_dice_loss(const SoftPrediction& pred, const LabelVolume& gt,
                              const MaskVolume& m, double epsilon, bool include_background) {
  if (!(epsilon > 0)) throw Error(ErrorCode::BadEpsilon, "epsilon must be > 0");
  if (pred.dims != gt.dims() || pred.probs.size() != gt.size()) {
    throw Error(ErrorCode::DimsMismatch, "prediction " + to_string(pred.dims) + " vs labels " +
                                             to_string(gt.dims()));
  }
  require_same_dims(gt, m, "soft_dice_loss");

  std::vector<ClassRow> probs;
  std::vector<std::uint8_t> labels;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!m[i]) continue;
    probs.push_back(pred.probs[i]);
    labels.push_back(gt[i]);
  }
  const auto terms =
      detail::dice_terms(kernels::omp::dice_sums(probs, labels), epsilon, include_background);

  SoftDiceResult r;
  r.loss = terms.loss;
  r.dsc = terms.dsc;
  r.grad.assign(gt.size(), ClassRow{});
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!m[i]) continue;
    for (int c = 0; c < kClassCount; ++c) {
      r.grad[i][c] = terms.b[c] + (gt[i] == c ? terms.a[c] : 0.0);
    }
  }
  return r;
}

}  // namespace skillroute
