#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "skillroute/grid.hpp"

namespace skillroute {

enum class VolumeFormat { Nifti, Svol };

/// ".nii" -> Nifti, ".svol" -> Svol. Anything else (including ".nii.gz",
/// which must be decompressed first) is rejected with UnsupportedDatatype.
VolumeFormat format_for(const std::filesystem::path& path);

/// Untyped payload as read from disk, after NIfTI scl_slope/scl_inter scaling.
struct RawVolume {
  Geometry geometry;
  std::vector<double> values;
};

RawVolume read_raw(const std::filesystem::path& path);

Volume load_scalar(const std::filesystem::path& path);
LabelVolume load_labels(const std::filesystem::path& path);
MaskVolume load_mask(const std::filesystem::path& path);

using AnyGrid = std::variant<Volume, LabelVolume, MaskVolume>;
AnyGrid load_volume(const std::filesystem::path& path, GridKind kind);

void write_volume(const Volume& v, const std::filesystem::path& path);
void write_volume(const LabelVolume& v, const std::filesystem::path& path);
void write_volume(const MaskVolume& v, const std::filesystem::path& path);

/// Conversions shared by the loaders: labels must be integral in {0..3};
/// masks are true wherever the value is nonzero (and must be integral).
LabelVolume to_labels(const RawVolume& raw);
MaskVolume to_mask(const RawVolume& raw);
Volume to_scalar(const RawVolume& raw);

namespace nifti {

inline constexpr std::int32_t kHeaderSize = 348;
inline constexpr std::int32_t kSingleFileOffset = 352;

enum class Datatype : std::int16_t {
  UInt8 = 2,
  Int16 = 4,
  Int32 = 8,
  Float32 = 16,
  Float64 = 64,
};

RawVolume read(const std::filesystem::path& path);

/// Writes a single-file ("n+1") image in native byte order with
/// scl_slope = 1 and scl_inter = 0.
void write(const std::filesystem::path& path, const Geometry& geometry,
           const std::vector<double>& values, Datatype datatype);

}  // namespace nifti

namespace svol {

enum class Kind { Scalar, Label, Mask };

struct Contents {
  RawVolume raw;
  Kind kind = Kind::Scalar;
};

Contents read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const Geometry& geometry,
           const std::vector<double>& values, Kind kind);

}  // namespace svol

}  // namespace skillroute
