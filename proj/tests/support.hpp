#pragma once

// Test-only helpers: scratch directories, random grids, and oracles that are
// written independently of the library code paths they check.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "skillroute/grid.hpp"

namespace testing_support {

namespace fs = std::filesystem;
using namespace skillroute;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / ("skillroute-test-" + tag + "-" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline Dims random_dims(std::mt19937_64& rng, std::size_t max_side = 6) {
  std::uniform_int_distribution<std::size_t> side(1, max_side);
  return {side(rng), side(rng), side(rng)};
}

inline Volume random_volume(std::mt19937_64& rng, Dims d) {
  std::uniform_real_distribution<float> u(-1000.0f, 1000.0f);
  std::vector<double> v(d.voxel_count());
  for (double& x : v) x = static_cast<double>(u(rng));  // float-representable
  std::uniform_real_distribution<float> sp(0.5f, 3.0f);
  return Volume(d, {static_cast<double>(sp(rng)), static_cast<double>(sp(rng)),
                    static_cast<double>(sp(rng))},
                std::move(v));
}

inline LabelVolume random_labels(std::mt19937_64& rng, Dims d) {
  std::uniform_int_distribution<int> u(0, 3);
  std::vector<std::uint8_t> v(d.voxel_count());
  for (auto& x : v) x = static_cast<std::uint8_t>(u(rng));
  return LabelVolume(d, {}, std::move(v));
}

inline MaskVolume random_mask(std::mt19937_64& rng, Dims d, double p_true = 0.7) {
  std::bernoulli_distribution b(p_true);
  std::vector<std::uint8_t> v(d.voxel_count());
  for (auto& x : v) x = b(rng) ? 1 : 0;
  v[0] = 1;
  return MaskVolume(d, {}, std::move(v));
}

inline MaskVolume full_mask(Dims d) {
  return MaskVolume(d, {}, std::vector<std::uint8_t>(d.voxel_count(), 1));
}

// ---------------------------------------------------------------------------
// Independent NIfTI-1 fixture writer. Lays the header out field by field from
// the published struct definition, optionally byte-swapped.

struct NiftiFixture {
  std::array<std::int16_t, 8> dim{3, 1, 1, 1, 1, 1, 1, 1};
  std::int16_t datatype = 16;
  std::int16_t bitpix = 32;
  std::array<float, 8> pixdim{1, 1, 1, 1, 1, 1, 1, 1};
  float vox_offset = 352;
  float scl_slope = 1;
  float scl_inter = 0;
  char magic[4] = {'n', '+', '1', '\0'};
  std::int32_t sizeof_hdr = 348;
  std::vector<unsigned char> payload;  // already in the target byte order
};

template <typename T>
void put_bytes(std::vector<unsigned char>& buf, std::size_t off, T v, bool swap) {
  auto b = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  if (swap) std::reverse(b.begin(), b.end());
  std::copy(b.begin(), b.end(), buf.begin() + static_cast<std::ptrdiff_t>(off));
}

template <typename T>
std::vector<unsigned char> encode_values(const std::vector<T>& values, bool swap) {
  std::vector<unsigned char> out(values.size() * sizeof(T));
  for (std::size_t i = 0; i < values.size(); ++i) put_bytes(out, i * sizeof(T), values[i], swap);
  return out;
}

inline void write_nifti_fixture(const fs::path& path, const NiftiFixture& f, bool swap) {
  std::vector<unsigned char> buf(static_cast<std::size_t>(f.vox_offset), 0);
  put_bytes(buf, 0, f.sizeof_hdr, swap);
  for (std::size_t i = 0; i < 8; ++i) put_bytes(buf, 40 + 2 * i, f.dim[i], swap);
  put_bytes(buf, 70, f.datatype, swap);
  put_bytes(buf, 72, f.bitpix, swap);
  for (std::size_t i = 0; i < 8; ++i) put_bytes(buf, 76 + 4 * i, f.pixdim[i], swap);
  put_bytes(buf, 108, f.vox_offset, swap);
  put_bytes(buf, 112, f.scl_slope, swap);
  put_bytes(buf, 116, f.scl_inter, swap);
  std::memcpy(buf.data() + 344, f.magic, 4);
  buf.insert(buf.end(), f.payload.begin(), f.payload.end());
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

// ---------------------------------------------------------------------------
// Oracles

/// Soft Dice loss evaluated directly from its definition over masked voxels.
inline double soft_dice_oracle(const std::vector<std::array<double, 4>>& probs,
                               const std::vector<int>& labels, const std::vector<bool>& mask,
                               double eps, bool include_background = true) {
  double loss = include_background ? 4.0 : 3.0;
  for (int c = include_background ? 0 : 1; c < 4; ++c) {
    double inter = 0, p = 0, g = 0;
    for (std::size_t v = 0; v < probs.size(); ++v) {
      if (!mask[v]) continue;
      const double gi = labels[v] == c ? 1.0 : 0.0;
      inter += probs[v][c] * gi;
      p += probs[v][c];
      g += gi;
    }
    loss -= (2 * inter + eps) / (p + g + eps);
  }
  return loss;
}

/// 2|A∩B| / (|A|+|B|) by voxel enumeration; 1 when both sets are empty.
inline double set_overlap_dice(const LabelVolume& a, const LabelVolume& b, const MaskVolume& m,
                               int cls) {
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!m[i]) continue;
    const bool in_a = a[i] == cls, in_b = b[i] == cls;
    na += in_a;
    nb += in_b;
    both += in_a && in_b;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

}  // namespace testing_support
