#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp` with an identical
// signature. The library calls the OpenMP versions; tests hold them against
// the serial ones.
//
// The OpenMP reductions sum fixed-size chunks in parallel and then combine the
// chunk partials in order, so their results do not depend on the thread count.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "skillroute/grid.hpp"

namespace skillroute::kernels {

inline constexpr int kFeatureCount = 4;

using FeatureRow = std::array<double, kFeatureCount>;
using ClassRow = std::array<double, kClassCount>;
using WeightMatrix = std::array<FeatureRow, kClassCount>;  // [class][feature]

/// Chunk length for order-stable parallel reductions.
inline constexpr std::size_t kReduceChunk = 4096;

struct NeighborhoodStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct DiceSums {
  ClassRow intersection{};  // sum p_c * g_c
  ClassRow predicted{};     // sum p_c
  ClassRow truth{};         // sum g_c
};

struct KMeansStep {
  std::array<double, 3> sum{};
  std::array<std::size_t, 3> count{};
};

#define SKILLROUTE_KERNEL_DECLS                                                                \
  /* Bin index floor((v-lo)/(hi-lo)*bins), clamped to [0, bins-1]. */                        \
  std::vector<std::uint64_t> bin_counts(std::span<const double> values, double lo, double hi, \
                                        std::size_t bins);                                   \
  /* Mean and population stddev over in-mask voxels of each 3x3x3 neighborhood; */           \
  /* zero outside the mask. */                                                               \
  NeighborhoodStats neighborhood_stats(const Volume& v, const MaskVolume& m);                \
  /* Row-wise softmax of features * weights^T. */                                            \
  void softmax_forward(std::span<const FeatureRow> features, const WeightMatrix& weights,     \
                       std::span<ClassRow> probs);                                           \
  DiceSums dice_sums(std::span<const ClassRow> probs, std::span<const std::uint8_t> labels); \
  /* d loss / d weights when d loss / d p[v][c] = a[c] * [label_v == c] + b[c]. */            \
  WeightMatrix softmax_weight_gradient(std::span<const FeatureRow> features,                 \
                                       std::span<const ClassRow> probs,                      \
                                       std::span<const std::uint8_t> labels,                 \
                                       const ClassRow& a, const ClassRow& b);                \
  /* Nearest-center assignment (ties to the lower index) plus per-cluster sums. */           \
  KMeansStep kmeans_assign(std::span<const double> values, const std::array<double, 3>& centers, \
                           std::span<std::uint8_t> assignment);

namespace serial {
SKILLROUTE_KERNEL_DECLS
}  // namespace serial

namespace omp {
SKILLROUTE_KERNEL_DECLS
}  // namespace omp

#undef SKILLROUTE_KERNEL_DECLS

/// Number of worker threads OpenMP will use for the kernels (1 when built
/// without OpenMP).
int max_threads();

}  // namespace skillroute::kernels
