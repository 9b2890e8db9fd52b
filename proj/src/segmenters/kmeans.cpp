#include <algorithm>
#include <cmath>
#include <numeric>

#include "skillroute/preprocess.hpp"
#include "skillroute/segmenters.hpp"

namespace skillroute {

LabelVolume segment_kmeans(const Volume& v, const MaskVolume& m, const KMeansConfig& cfg) {
  const MaskedVoxels masked = apply_mask(v, m);
  const std::vector<double>& values = masked.values;

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) distinct += sorted[i] != sorted[i - 1];
  if (distinct < 3) {
    throw Error(ErrorCode::DegenerateClustering, "fewer than 3 distinct masked intensities");
  }

  std::array<double, 3> centers;
  for (std::size_t c = 0; c < 3; ++c) {
    const double q = static_cast<double>(2 * c + 1) / 6.0;
    centers[c] = sorted[static_cast<std::size_t>(std::floor(q * static_cast<double>(sorted.size() - 1)))];
  }

  std::vector<std::uint8_t> assignment(values.size());
  for (std::size_t iter = 0; iter < std::max<std::size_t>(cfg.max_iters, 1); ++iter) {
    const kernels::KMeansStep step = kernels::omp::kmeans_assign(values, centers, assignment);
    double shift = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      if (step.count[c] == 0) {
        throw Error(ErrorCode::DegenerateClustering, "cluster " + std::to_string(c) + " is empty");
      }
      const double updated = step.sum[c] / static_cast<double>(step.count[c]);
      shift = std::max(shift, std::abs(updated - centers[c]));
      centers[c] = updated;
    }
    if (shift <= cfg.tol) break;
  }
  // Final assignment against the converged centers.
  const kernels::KMeansStep last = kernels::omp::kmeans_assign(values, centers, assignment);
  std::array<double, 3> means;
  for (std::size_t c = 0; c < 3; ++c) {
    if (last.count[c] == 0) {
      throw Error(ErrorCode::DegenerateClustering, "cluster " + std::to_string(c) + " is empty");
    }
    means[c] = last.sum[c] / static_cast<double>(last.count[c]);
  }

  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });
  std::array<std::uint8_t, 3> label_of{};
  for (std::size_t rank = 0; rank < 3; ++rank) label_of[order[rank]] = static_cast<std::uint8_t>(rank + 1);

  std::vector<std::uint8_t> labels(v.size(), kBackground);
  std::size_t j = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) labels[i] = label_of[assignment[j++]];
  }
  return LabelVolume(v.geometry(), std::move(labels));
}

}  // namespace skillroute
