#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "skillroute/grid.hpp"

namespace skillroute {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Per-tissue results for CSF, GM and WM (index 0..2 = classes 1..3).
struct EvaluationReport {
  std::string volume_id;
  std::array<double, 3> per_class_dsc{};
  double macro_dsc = 0;
  std::array<ConfusionCounts, 3> counts{};
  bool operator==(const EvaluationReport&) const = default;
};

/// Counts over masked voxels for one tissue class in {1,2,3}.
ConfusionCounts confusion_counts(const LabelVolume& pred, const LabelVolume& gt,
                                 const MaskVolume& m, int class_id);

/// 2TP / (2TP + FP + FN); 1 when the class is absent from both.
double dsc(const ConfusionCounts& c);

EvaluationReport evaluate_volume(const LabelVolume& pred, const LabelVolume& gt,
                                 const MaskVolume& m, std::string volume_id = {});

}  // namespace skillroute
