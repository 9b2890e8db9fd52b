#include "skillroute/volume_io.hpp"

#include <cmath>

namespace skillroute {

namespace fs = std::filesystem;

VolumeFormat format_for(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".nii") return VolumeFormat::Nifti;
  if (ext == ".svol") return VolumeFormat::Svol;
  if (ext == ".gz") {
    throw Error(ErrorCode::UnsupportedDatatype,
                "compressed volumes are not read directly; decompress " + path.string() + " first");
  }
  throw Error(ErrorCode::UnsupportedDatatype, "unknown volume extension: " + path.string());
}

RawVolume read_raw(const fs::path& path) {
  if (format_for(path) == VolumeFormat::Nifti) return nifti::read(path);
  return svol::read(path).raw;
}

namespace {

std::uint8_t integral_value(double v, double max_value, std::string_view what) {
  if (v != std::floor(v) || v < 0 || v > max_value) {
    throw Error(ErrorCode::LabelOutOfRange,
                std::string(what) + " value " + std::to_string(v) + " is not allowed");
  }
  return static_cast<std::uint8_t>(v);
}

std::vector<double> widen(std::span<const std::uint8_t> v) { return {v.begin(), v.end()}; }

}  // namespace

Volume to_scalar(const RawVolume& raw) { return Volume(raw.geometry, raw.values); }

LabelVolume to_labels(const RawVolume& raw) {
  std::vector<std::uint8_t> labels(raw.values.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = integral_value(raw.values[i], 3, "label");
  }
  return LabelVolume(raw.geometry, std::move(labels));
}

MaskVolume to_mask(const RawVolume& raw) {
  std::vector<std::uint8_t> flags(raw.values.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const double v = raw.values[i];
    if (v != std::floor(v)) {
      throw Error(ErrorCode::LabelOutOfRange, "mask value " + std::to_string(v) + " is not integral");
    }
    flags[i] = v != 0.0 ? 1 : 0;
  }
  return MaskVolume(raw.geometry, std::move(flags));
}

Volume load_scalar(const fs::path& path) { return to_scalar(read_raw(path)); }
LabelVolume load_labels(const fs::path& path) { return to_labels(read_raw(path)); }
MaskVolume load_mask(const fs::path& path) { return to_mask(read_raw(path)); }

AnyGrid load_volume(const fs::path& path, GridKind kind) {
  switch (kind) {
    case GridKind::Scalar: return load_scalar(path);
    case GridKind::Label: return load_labels(path);
    case GridKind::Mask: return load_mask(path);
  }
  return load_scalar(path);
}

void write_volume(const Volume& v, const fs::path& path) {
  std::vector<double> values(v.values().begin(), v.values().end());
  if (format_for(path) == VolumeFormat::Nifti) {
    nifti::write(path, v.geometry(), values, nifti::Datatype::Float32);
  } else {
    svol::write(path, v.geometry(), values, svol::Kind::Scalar);
  }
}

void write_volume(const LabelVolume& v, const fs::path& path) {
  if (format_for(path) == VolumeFormat::Nifti) {
    nifti::write(path, v.geometry(), widen(v.values()), nifti::Datatype::UInt8);
  } else {
    svol::write(path, v.geometry(), widen(v.values()), svol::Kind::Label);
  }
}

void write_volume(const MaskVolume& v, const fs::path& path) {
  if (format_for(path) == VolumeFormat::Nifti) {
    nifti::write(path, v.geometry(), widen(v.values()), nifti::Datatype::UInt8);
  } else {
    svol::write(path, v.geometry(), widen(v.values()), svol::Kind::Mask);
  }
}

}  // namespace skillroute
