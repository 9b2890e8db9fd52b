#include "detail.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace skillroute::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace omp {
namespace {

std::size_t chunk_count(std::size_t n) { return (n + kReduceChunk - 1) / kReduceChunk; }

// Runs `body(begin, end, partial)` over fixed chunks in parallel and folds the
// partials left to right.
template <typename Partial, typename Body>
Partial chunked_reduce(std::size_t n, Body body) {
  const std::size_t chunks = chunk_count(n);
  std::vector<Partial> partials(chunks);
  const auto chunks_signed = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < chunks_signed; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t end = std::min(n, begin + kReduceChunk);
    // Accumulate in a local so the compiler can keep it in registers.
    Partial local{};
    body(begin, end, local);
    partials[static_cast<std::size_t>(c)] = local;
  }
  Partial total{};
  for (const Partial& p : partials) detail::add_into(total, p);
  return total;
}

}  // namespace

std::vector<std::uint64_t> bin_counts(std::span<const double> values, double lo, double hi,
                                      std::size_t bins) {
  std::vector<std::uint64_t> counts(bins, 0);
  const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ++local[detail::bin_index(values[static_cast<std::size_t>(i)], lo, hi, bins)];
    }
#pragma omp critical
    for (std::size_t b = 0; b < bins; ++b) counts[b] += local[b];
  }
  return counts;
}

NeighborhoodStats neighborhood_stats(const Volume& v, const MaskVolume& m) {
  const Dims& d = v.dims();
  NeighborhoodStats out{std::vector<double>(d.voxel_count(), 0.0),
                        std::vector<double>(d.voxel_count(), 0.0)};
  const auto nz = static_cast<std::ptrdiff_t>(d.nz);
  const auto ny = static_cast<std::ptrdiff_t>(d.ny);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t z = 0; z < nz; ++z)
    for (std::ptrdiff_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x) {
        const auto zu = static_cast<std::size_t>(z), yu = static_cast<std::size_t>(y);
        const std::size_t i = d.index(x, yu, zu);
        if (m[i]) detail::neighborhood_at(v, m, x, yu, zu, out.mean[i], out.stddev[i]);
      }
  return out;
}

void softmax_forward(std::span<const FeatureRow> features, const WeightMatrix& weights,
                     std::span<ClassRow> probs) {
  const auto n = static_cast<std::ptrdiff_t>(features.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    detail::softmax_row(features[u], weights, probs[u]);
  }
}

DiceSums dice_sums(std::span<const ClassRow> probs, std::span<const std::uint8_t> labels) {
  return chunked_reduce<DiceSums>(probs.size(), [&](std::size_t b, std::size_t e, DiceSums& s) {
    for (std::size_t i = b; i < e; ++i) detail::accumulate_dice(probs[i], labels[i], s);
  });
}

WeightMatrix softmax_weight_gradient(std::span<const FeatureRow> features,
                                     std::span<const ClassRow> probs,
                                     std::span<const std::uint8_t> labels, const ClassRow& a,
                                     const ClassRow& b) {
  return chunked_reduce<WeightMatrix>(
      features.size(), [&](std::size_t lo, std::size_t hi, WeightMatrix& g) {
        for (std::size_t i = lo; i < hi; ++i) {
          detail::accumulate_weight_gradient(features[i], probs[i], labels[i], a, b, g);
        }
      });
}

KMeansStep kmeans_assign(std::span<const double> values, const std::array<double, 3>& centers,
                         std::span<std::uint8_t> assignment) {
  return chunked_reduce<KMeansStep>(
      values.size(), [&](std::size_t lo, std::size_t hi, KMeansStep& s) {
        for (std::size_t i = lo; i < hi; ++i) {
          const std::uint8_t c = detail::nearest_center(values[i], centers);
          assignment[i] = c;
          s.sum[c] += values[i];
          ++s.count[c];
        }
      });
}

}  // namespace omp
}  // namespace skillroute::kernels
