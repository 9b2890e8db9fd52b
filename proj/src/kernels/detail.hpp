#pragma once

// Per-element operations shared by the serial and OpenMP kernels, so the two
// differ only in loop scheduling and reduction order.

#include <algorithm>
#include <cmath>

#include "skillroute/kernels.hpp"

namespace skillroute::kernels::detail {

inline std::size_t bin_index(double v, double lo, double hi, std::size_t bins) {
  const double t = (v - lo) / (hi - lo) * static_cast<double>(bins);
  if (!(t > 0)) return 0;
  const auto b = static_cast<std::size_t>(std::floor(t));
  return std::min(b, bins - 1);
}

inline void softmax_row(const FeatureRow& f, const WeightMatrix& w, ClassRow& out) {
  ClassRow z;
  for (int c = 0; c < kClassCount; ++c) {
    double s = 0;
    for (int k = 0; k < kFeatureCount; ++k) s += w[c][k] * f[k];
    z[c] = s;
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  double total = 0;
  for (int c = 0; c < kClassCount; ++c) {
    out[c] = std::exp(z[c] - zmax);
    total += out[c];
  }
  for (int c = 0; c < kClassCount; ++c) out[c] /= total;
}

inline void neighborhood_at(const Volume& v, const MaskVolume& m, std::size_t x, std::size_t y,
                            std::size_t z, double& mean, double& stddev) {
  const Dims& d = v.dims();
  double sum = 0, sum_sq = 0;
  std::size_t n = 0;
  const std::size_t z0 = z == 0 ? 0 : z - 1, z1 = std::min(z + 1, d.nz - 1);
  const std::size_t y0 = y == 0 ? 0 : y - 1, y1 = std::min(y + 1, d.ny - 1);
  const std::size_t x0 = x == 0 ? 0 : x - 1, x1 = std::min(x + 1, d.nx - 1);
  for (std::size_t zz = z0; zz <= z1; ++zz) {
    for (std::size_t yy = y0; yy <= y1; ++yy) {
      for (std::size_t xx = x0; xx <= x1; ++xx) {
        const std::size_t i = d.index(xx, yy, zz);
        if (!m[i]) continue;
        sum += v[i];
        sum_sq += v[i] * v[i];
        ++n;
      }
    }
  }
  mean = sum / static_cast<double>(n);
  stddev = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean));
}

inline void accumulate_dice(const ClassRow& p, std::uint8_t label, DiceSums& s) {
  for (int c = 0; c < kClassCount; ++c) {
    s.predicted[c] += p[c];
    if (label == c) {
      s.intersection[c] += p[c];
      s.truth[c] += 1.0;
    }
  }
}

inline void accumulate_weight_gradient(const FeatureRow& f, const ClassRow& p, std::uint8_t label,
                                       const ClassRow& a, const ClassRow& b, WeightMatrix& g) {
  // d loss / d z_c = p_c * (G_c - sum_j p_j G_j), with G = d loss / d p.
  ClassRow G;
  double mix = 0;
  for (int c = 0; c < kClassCount; ++c) {
    G[c] = b[c] + (label == c ? a[c] : 0.0);
    mix += p[c] * G[c];
  }
  for (int c = 0; c < kClassCount; ++c) {
    const double dz = p[c] * (G[c] - mix);
    for (int k = 0; k < kFeatureCount; ++k) g[c][k] += dz * f[k];
  }
}

inline std::uint8_t nearest_center(double v, const std::array<double, 3>& centers) {
  std::uint8_t best = 0;
  double best_d = std::abs(v - centers[0]);
  for (std::uint8_t c = 1; c < 3; ++c) {
    const double d = std::abs(v - centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

inline void add_into(DiceSums& acc, const DiceSums& part) {
  for (int c = 0; c < kClassCount; ++c) {
    acc.intersection[c] += part.intersection[c];
    acc.predicted[c] += part.predicted[c];
    acc.truth[c] += part.truth[c];
  }
}

inline void add_into(WeightMatrix& acc, const WeightMatrix& part) {
  for (int c = 0; c < kClassCount; ++c)
    for (int k = 0; k < kFeatureCount; ++k) acc[c][k] += part[c][k];
}

inline void add_into(KMeansStep& acc, const KMeansStep& part) {
  for (int c = 0; c < 3; ++c) {
    acc.sum[c] += part.sum[c];
    acc.count[c] += part.count[c];
  }
}

}  // namespace skillroute::kernels::detail
