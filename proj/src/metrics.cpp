#include "skillroute/metrics.hpp"

namespace skillroute {

ConfusionCounts confusion_counts(const LabelVolume& pred, const LabelVolume& gt,
                                 const MaskVolume& m, int class_id) {
  if (class_id < 1 || class_id > 3) {
    throw Error(ErrorCode::BadClass, "class id must be 1, 2 or 3, got " + std::to_string(class_id));
  }
  require_same_dims(pred, gt, "confusion_counts");
  require_same_dims(pred, m, "confusion_counts");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!m[i]) continue;
    const bool p = pred[i] == class_id;
    const bool g = gt[i] == class_id;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double dsc(const ConfusionCounts& c) {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

EvaluationReport evaluate_volume(const LabelVolume& pred, const LabelVolume& gt,
                                 const MaskVolume& m, std::string volume_id) {
  EvaluationReport r;
  r.volume_id = std::move(volume_id);
  double sum = 0;
  for (int c = 1; c <= 3; ++c) {
    r.counts[c - 1] = confusion_counts(pred, gt, m, c);
    r.per_class_dsc[c - 1] = dsc(r.counts[c - 1]);
    sum += r.per_class_dsc[c - 1];
  }
  r.macro_dsc = sum / 3.0;
  return r;
}

}  // namespace skillroute
