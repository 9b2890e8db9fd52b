#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skillroute/error.hpp"

namespace skillroute {

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  std::size_t voxel_count() const { return nx * ny * nz; }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + nx * (y + ny * z);
  }
  bool operator==(const Dims&) const = default;
};

std::string to_string(const Dims& d);

struct Spacing {
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;
  bool operator==(const Spacing&) const = default;
};

/// NIfTI orientation fields. Carried through load/write untouched; nothing in
/// the library interprets them.
struct Orientation {
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 0;
  float qfac = 1.0f;  // pixdim[0]
  std::array<float, 3> quatern{};
  std::array<float, 3> qoffset{};
  std::array<float, 12> srow{};
  bool operator==(const Orientation&) const = default;
};

struct Geometry {
  Dims dims;
  Spacing spacing;
  Orientation orientation;
  bool operator==(const Geometry&) const = default;
};

enum class GridKind { Scalar, Label, Mask };

inline constexpr int kClassCount = 4;
inline constexpr std::uint8_t kBackground = 0;
inline constexpr std::uint8_t kCsf = 1;
inline constexpr std::uint8_t kGm = 2;
inline constexpr std::uint8_t kWm = 3;

template <GridKind Kind>
struct GridTraits;

template <>
struct GridTraits<GridKind::Scalar> {
  using value_type = double;
};
template <>
struct GridTraits<GridKind::Label> {
  using value_type = std::uint8_t;
};
template <>
struct GridTraits<GridKind::Mask> {
  using value_type = std::uint8_t;
};

/// Immutable 3D grid in x-fastest order. The constructor enforces the per-kind
/// value invariants (finite scalars, labels in {0..3}, masks in {0,1}).
template <GridKind Kind>
class Grid {
 public:
  using value_type = typename GridTraits<Kind>::value_type;
  static constexpr GridKind kind = Kind;

  Grid() = default;

  Grid(Geometry geometry, std::vector<value_type> data)
      : geometry_(geometry), data_(std::move(data)) {
    validate();
  }

  Grid(Dims dims, Spacing spacing, std::vector<value_type> data)
      : Grid(Geometry{dims, spacing, {}}, std::move(data)) {}

  const Geometry& geometry() const { return geometry_; }
  const Dims& dims() const { return geometry_.dims; }
  const Spacing& spacing() const { return geometry_.spacing; }
  const Orientation& orientation() const { return geometry_.orientation; }

  std::size_t size() const { return data_.size(); }
  std::span<const value_type> values() const { return data_; }
  value_type operator[](std::size_t i) const { return data_[i]; }
  value_type at(std::size_t x, std::size_t y, std::size_t z) const {
    return data_[geometry_.dims.index(x, y, z)];
  }

  bool operator==(const Grid&) const = default;

 private:
  void validate() const {
    const Dims& d = geometry_.dims;
    if (d.nx == 0 || d.ny == 0 || d.nz == 0) {
      throw Error(ErrorCode::MalformedHeader, "grid dims must be positive, got " + to_string(d));
    }
    if (data_.size() != d.voxel_count()) {
      throw Error(ErrorCode::DimsMismatch,
                  "data length " + std::to_string(data_.size()) + " does not match dims " +
                      to_string(d));
    }
    const Spacing& s = geometry_.spacing;
    if (!(s.sx > 0 && s.sy > 0 && s.sz > 0) || !std::isfinite(s.sx) || !std::isfinite(s.sy) ||
        !std::isfinite(s.sz)) {
      throw Error(ErrorCode::MalformedHeader, "voxel spacing must be positive and finite");
    }
    if constexpr (Kind == GridKind::Scalar) {
      for (double v : data_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteData, "non-finite intensity");
      }
    } else if constexpr (Kind == GridKind::Label) {
      for (auto v : data_) {
        if (v > 3) {
          throw Error(ErrorCode::LabelOutOfRange, "label value " + std::to_string(v));
        }
      }
    } else {
      for (auto v : data_) {
        if (v > 1) throw Error(ErrorCode::LabelOutOfRange, "mask value " + std::to_string(v));
      }
    }
  }

  Geometry geometry_;
  std::vector<value_type> data_;
};

using Volume = Grid<GridKind::Scalar>;
using LabelVolume = Grid<GridKind::Label>;
using MaskVolume = Grid<GridKind::Mask>;

template <GridKind A, GridKind B>
void require_same_dims(const Grid<A>& a, const Grid<B>& b, std::string_view what = {}) {
  if (a.dims() != b.dims()) {
    std::string msg = to_string(a.dims()) + " vs " + to_string(b.dims());
    if (!what.empty()) msg = std::string(what) + ": " + msg;
    throw Error(ErrorCode::DimsMismatch, msg);
  }
}

std::size_t count_true(const MaskVolume& m);

}  // namespace skillroute
