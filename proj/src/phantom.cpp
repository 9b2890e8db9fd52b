#include "skillroute/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace skillroute {

void PhantomSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::BadSpec, msg); };
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) fail("dims must be positive");
  if (!(spacing.sx > 0 && spacing.sy > 0 && spacing.sz > 0)) fail("spacing must be positive");
  for (double m : tissue_means) {
    if (!(m >= 0 && m <= 1)) fail("tissue means must lie in [0,1]");
  }
  if (!(tissue_means[0] < tissue_means[1] && tissue_means[1] < tissue_means[2])) {
    fail("tissue means must increase CSF < GM < WM");
  }
  for (double s : tissue_stddevs) {
    if (!(s > 0) || !std::isfinite(s)) fail("tissue stddevs must be > 0");
  }
  double total = 0;
  for (double f : tissue_fractions) {
    if (!(f > 0)) fail("tissue fractions must be > 0");
    total += f;
  }
  if (total > 1 + 1e-9) fail("tissue fractions must sum to <= 1");
  if (!(bias_amplitude >= 0 && bias_amplitude < 1)) fail("bias amplitude must be in [0,1)");
}

Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  const Dims& d = spec.dims;
  const std::size_t n = d.voxel_count();
  const std::array<double, 3> extent{static_cast<double>(d.nx), static_cast<double>(d.ny),
                                     static_cast<double>(d.nz)};
  auto normalized = [&](std::size_t axis, std::size_t i) {
    const double c = (extent[axis] - 1) / 2;
    return (static_cast<double>(i) - c) / (0.45 * extent[axis]);
  };

  std::vector<std::uint8_t> mask(n, 0);
  std::vector<double> radius(n, 0.0);
  std::vector<std::size_t> inside;
  for (std::size_t z = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x) {
        const double u = normalized(0, x), v = normalized(1, y), w = normalized(2, z);
        const double r = std::sqrt(u * u + v * v + w * w);
        const std::size_t i = d.index(x, y, z);
        radius[i] = r;
        if (r <= 1.0) {
          mask[i] = 1;
          inside.push_back(i);
        }
      }

  // Outermost voxels first; the first CSF share becomes the outer shell.
  std::vector<std::size_t> by_radius = inside;
  std::stable_sort(by_radius.begin(), by_radius.end(),
                   [&](std::size_t a, std::size_t b) { return radius[a] > radius[b]; });
  const auto& f = spec.tissue_fractions;
  const double total = f[0] + f[1] + f[2];
  const auto m = static_cast<double>(inside.size());
  const auto csf_end = static_cast<std::size_t>(std::llround(m * f[0] / total));
  const auto gm_end = static_cast<std::size_t>(std::llround(m * (f[0] + f[1]) / total));

  std::vector<std::uint8_t> labels(n, kBackground);
  for (std::size_t k = 0; k < by_radius.size(); ++k) {
    labels[by_radius[k]] = k < csf_end ? kCsf : (k < gm_end ? kGm : kWm);
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::array<double, 3> quad{}, lin{};
  for (std::size_t a = 0; a < 3; ++a) {
    quad[a] = coef(rng);
    lin[a] = coef(rng);
  }

  std::vector<double> bias(n, 1.0);
  if (spec.bias_amplitude > 0 && !inside.empty()) {
    std::vector<double> poly(n, 0.0);
    for (std::size_t z = 0; z < d.nz; ++z)
      for (std::size_t y = 0; y < d.ny; ++y)
        for (std::size_t x = 0; x < d.nx; ++x) {
          const std::array<double, 3> t{normalized(0, x), normalized(1, y), normalized(2, z)};
          double p = 0;
          for (std::size_t a = 0; a < 3; ++a) p += quad[a] * t[a] * t[a] + lin[a] * t[a];
          poly[d.index(x, y, z)] = p;
        }
    double lo = poly[inside.front()], hi = lo;
    for (std::size_t i : inside) {
      lo = std::min(lo, poly[i]);
      hi = std::max(hi, poly[i]);
    }
    if (hi > lo) {
      const double a = spec.bias_amplitude;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = std::clamp((poly[i] - lo) / (hi - lo), 0.0, 1.0);
        bias[i] = 1 - a + 2 * a * t;
      }
    }
  }

  std::vector<double> intensity(n, 0.0);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const std::size_t t = labels[i] - 1;
    const double g = spec.tissue_means[t] + spec.tissue_stddevs[t] * unit(rng);
    intensity[i] = std::clamp(g * bias[i], 0.0, 1.0);
  }

  const Geometry g{d, spec.spacing, {}};
  return {Volume(g, std::move(intensity)), LabelVolume(g, std::move(labels)),
          MaskVolume(g, std::move(mask))};
}

}  // namespace skillroute
