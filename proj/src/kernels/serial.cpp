#include "detail.hpp"

namespace skillroute::kernels::serial {

std::vector<std::uint64_t> bin_counts(std::span<const double> values, double lo, double hi,
                                      std::size_t bins) {
  std::vector<std::uint64_t> counts(bins, 0);
  for (double v : values) ++counts[detail::bin_index(v, lo, hi, bins)];
  return counts;
}

NeighborhoodStats neighborhood_stats(const Volume& v, const MaskVolume& m) {
  const Dims& d = v.dims();
  NeighborhoodStats out{std::vector<double>(d.voxel_count(), 0.0),
                        std::vector<double>(d.voxel_count(), 0.0)};
  for (std::size_t z = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x) {
        const std::size_t i = d.index(x, y, z);
        if (m[i]) detail::neighborhood_at(v, m, x, y, z, out.mean[i], out.stddev[i]);
      }
  return out;
}

void softmax_forward(std::span<const FeatureRow> features, const WeightMatrix& weights,
                     std::span<ClassRow> probs) {
  for (std::size_t i = 0; i < features.size(); ++i) detail::softmax_row(features[i], weights, probs[i]);
}

DiceSums dice_sums(std::span<const ClassRow> probs, std::span<const std::uint8_t> labels) {
  DiceSums s;
  for (std::size_t i = 0; i < probs.size(); ++i) detail::accumulate_dice(probs[i], labels[i], s);
  return s;
}

WeightMatrix softmax_weight_gradient(std::span<const FeatureRow> features,
                                     std::span<const ClassRow> probs,
                                     std::span<const std::uint8_t> labels, const ClassRow& a,
                                     const ClassRow& b) {
  WeightMatrix g{};
  for (std::size_t i = 0; i < features.size(); ++i) {
    detail::accumulate_weight_gradient(features[i], probs[i], labels[i], a, b, g);
  }
  return g;
}

KMeansStep kmeans_assign(std::span<const double> values, const std::array<double, 3>& centers,
                         std::span<std::uint8_t> assignment) {
  KMeansStep s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint8_t c = detail::nearest_center(values[i], centers);
    assignment[i] = c;
    s.sum[c] += values[i];
    ++s.count[c];
  }
  return s;
}

}  // namespace skillroute::kernels::serial
