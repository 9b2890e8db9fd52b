// NIfTI-1 reader/writer. Only the fields the library needs are decoded; the
// orientation block is carried through verbatim.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "skillroute/volume_io.hpp"

namespace skillroute::nifti {
namespace {

namespace fs = std::filesystem;

// Field offsets within the 348-byte header.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffQformCode = 252;
constexpr std::size_t kOffSformCode = 254;
constexpr std::size_t kOffQuatern = 256;
constexpr std::size_t kOffQoffset = 268;
constexpr std::size_t kOffSrow = 280;
constexpr std::size_t kOffMagic = 344;

template <typename T>
T byteswap_value(T v) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

class Reader {
 public:
  Reader(const std::vector<char>& buf, bool swapped) : buf_(buf), swapped_(swapped) {}

  template <typename T>
  T get(std::size_t offset) const {
    if (offset + sizeof(T) > buf_.size()) {
      throw Error(ErrorCode::MalformedHeader, "truncated file");
    }
    T v;
    std::memcpy(&v, buf_.data() + offset, sizeof(T));
    return swapped_ ? byteswap_value(v) : v;
  }

 private:
  const std::vector<char>& buf_;
  bool swapped_;
};

std::vector<char> slurp(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t element_size(std::int16_t datatype) {
  switch (static_cast<Datatype>(datatype)) {
    case Datatype::UInt8: return 1;
    case Datatype::Int16: return 2;
    case Datatype::Int32: return 4;
    case Datatype::Float32: return 4;
    case Datatype::Float64: return 8;
  }
  throw Error(ErrorCode::UnsupportedDatatype, "NIfTI datatype code " + std::to_string(datatype));
}

std::vector<double> decode_payload(const std::vector<char>& buf, std::size_t offset,
                                   std::size_t count, std::int16_t datatype, bool swapped) {
  const std::size_t elem = element_size(datatype);
  if (offset > buf.size() || (buf.size() - offset) / elem < count) {
    throw Error(ErrorCode::MalformedHeader, "payload shorter than dims require");
  }
  Reader r(buf, swapped);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = offset + i * elem;
    switch (static_cast<Datatype>(datatype)) {
      case Datatype::UInt8: out[i] = static_cast<unsigned char>(buf[at]); break;
      case Datatype::Int16: out[i] = r.get<std::int16_t>(at); break;
      case Datatype::Int32: out[i] = r.get<std::int32_t>(at); break;
      case Datatype::Float32: out[i] = r.get<float>(at); break;
      case Datatype::Float64: out[i] = r.get<double>(at); break;
    }
  }
  return out;
}

template <typename T>
void put(std::vector<char>& buf, std::size_t offset, T v) {
  std::memcpy(buf.data() + offset, &v, sizeof(T));
}

}  // namespace

RawVolume read(const fs::path& path) {
  const std::vector<char> buf = slurp(path);
  if (buf.size() < static_cast<std::size_t>(kHeaderSize)) {
    throw Error(ErrorCode::MalformedHeader, "file shorter than a NIfTI-1 header: " + path.string());
  }

  std::int32_t sizeof_hdr;
  std::memcpy(&sizeof_hdr, buf.data() + kOffSizeofHdr, sizeof sizeof_hdr);
  bool swapped = false;
  if (sizeof_hdr != kHeaderSize) {
    if (byteswap_value(sizeof_hdr) != kHeaderSize) {
      throw Error(ErrorCode::MalformedHeader,
                  "sizeof_hdr is " + std::to_string(sizeof_hdr) + " in both byte orders");
    }
    swapped = true;
  }
  const Reader hdr(buf, swapped);

  const char* magic = buf.data() + kOffMagic;
  const bool single_file = std::memcmp(magic, "n+1\0", 4) == 0;
  const bool pair_file = std::memcmp(magic, "ni1\0", 4) == 0;
  if (!single_file && !pair_file) throw Error(ErrorCode::MalformedHeader, "bad magic");

  const auto ndim = hdr.get<std::int16_t>(kOffDim);
  if (ndim != 3) {
    throw Error(ErrorCode::MalformedHeader, "dim[0] must be 3, got " + std::to_string(ndim));
  }
  Geometry g;
  const auto nx = hdr.get<std::int16_t>(kOffDim + 2);
  const auto ny = hdr.get<std::int16_t>(kOffDim + 4);
  const auto nz = hdr.get<std::int16_t>(kOffDim + 6);
  if (nx <= 0 || ny <= 0 || nz <= 0) throw Error(ErrorCode::MalformedHeader, "non-positive dim");
  g.dims = {static_cast<std::size_t>(nx), static_cast<std::size_t>(ny),
            static_cast<std::size_t>(nz)};
  g.spacing = {hdr.get<float>(kOffPixdim + 4), hdr.get<float>(kOffPixdim + 8),
               hdr.get<float>(kOffPixdim + 12)};

  Orientation& o = g.orientation;
  o.qfac = hdr.get<float>(kOffPixdim);
  o.qform_code = hdr.get<std::int16_t>(kOffQformCode);
  o.sform_code = hdr.get<std::int16_t>(kOffSformCode);
  for (std::size_t i = 0; i < 3; ++i) {
    o.quatern[i] = hdr.get<float>(kOffQuatern + 4 * i);
    o.qoffset[i] = hdr.get<float>(kOffQoffset + 4 * i);
  }
  for (std::size_t i = 0; i < 12; ++i) o.srow[i] = hdr.get<float>(kOffSrow + 4 * i);

  const auto datatype = hdr.get<std::int16_t>(kOffDatatype);
  element_size(datatype);  // rejects unsupported codes before touching the payload

  const float vox_offset = hdr.get<float>(kOffVoxOffset);
  if (!(vox_offset >= 0) || !std::isfinite(vox_offset)) {
    throw Error(ErrorCode::MalformedHeader, "bad vox_offset");
  }
  const std::size_t count = g.dims.voxel_count();

  std::vector<double> values;
  if (single_file) {
    if (vox_offset < static_cast<float>(kHeaderSize)) {
      throw Error(ErrorCode::MalformedHeader, "vox_offset inside the header");
    }
    values = decode_payload(buf, static_cast<std::size_t>(vox_offset), count, datatype, swapped);
  } else {
    fs::path img = path;
    img.replace_extension(".img");
    values = decode_payload(slurp(img), static_cast<std::size_t>(vox_offset), count, datatype,
                            swapped);
  }

  float slope = hdr.get<float>(kOffSclSlope);
  const float inter = hdr.get<float>(kOffSclInter);
  if (slope == 0.0f || !std::isfinite(slope)) slope = 1.0f;
  if (slope != 1.0f || (inter != 0.0f && std::isfinite(inter))) {
    const double s = slope;
    const double b = std::isfinite(inter) ? inter : 0.0;
    for (double& v : values) v = v * s + b;
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteData, path.string());
  }
  return {g, std::move(values)};
}

void write(const fs::path& path, const Geometry& g, const std::vector<double>& values,
           Datatype datatype) {
  const Dims& d = g.dims;
  constexpr auto kMaxDim = static_cast<std::size_t>(INT16_MAX);
  if (d.nx > kMaxDim || d.ny > kMaxDim || d.nz > kMaxDim) {
    throw Error(ErrorCode::IoFailure, "dims exceed the NIfTI-1 int16 limit");
  }
  const std::size_t elem = element_size(static_cast<std::int16_t>(datatype));
  std::vector<char> buf(kSingleFileOffset + elem * values.size(), 0);

  put<std::int32_t>(buf, kOffSizeofHdr, kHeaderSize);
  put<char>(buf, 38, 'r');  // regular
  const std::int16_t dim[8] = {3,
                               static_cast<std::int16_t>(d.nx),
                               static_cast<std::int16_t>(d.ny),
                               static_cast<std::int16_t>(d.nz),
                               1, 1, 1, 1};
  for (std::size_t i = 0; i < 8; ++i) put(buf, kOffDim + 2 * i, dim[i]);
  put(buf, kOffDatatype, static_cast<std::int16_t>(datatype));
  put(buf, kOffBitpix, static_cast<std::int16_t>(8 * elem));
  const float pixdim[8] = {g.orientation.qfac,
                           static_cast<float>(g.spacing.sx),
                           static_cast<float>(g.spacing.sy),
                           static_cast<float>(g.spacing.sz),
                           1.0f, 1.0f, 1.0f, 1.0f};
  for (std::size_t i = 0; i < 8; ++i) put(buf, kOffPixdim + 4 * i, pixdim[i]);
  put(buf, kOffVoxOffset, static_cast<float>(kSingleFileOffset));
  put(buf, kOffSclSlope, 1.0f);
  put(buf, kOffSclInter, 0.0f);
  put(buf, 123, static_cast<char>(2));  // xyzt_units: mm
  put(buf, kOffQformCode, g.orientation.qform_code);
  put(buf, kOffSformCode, g.orientation.sform_code);
  for (std::size_t i = 0; i < 3; ++i) {
    put(buf, kOffQuatern + 4 * i, g.orientation.quatern[i]);
    put(buf, kOffQoffset + 4 * i, g.orientation.qoffset[i]);
  }
  for (std::size_t i = 0; i < 12; ++i) put(buf, kOffSrow + 4 * i, g.orientation.srow[i]);
  std::memcpy(buf.data() + kOffMagic, "n+1\0", 4);

  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t at = kSingleFileOffset + i * elem;
    switch (datatype) {
      case Datatype::UInt8: put(buf, at, static_cast<std::uint8_t>(values[i])); break;
      case Datatype::Int16: put(buf, at, static_cast<std::int16_t>(values[i])); break;
      case Datatype::Int32: put(buf, at, static_cast<std::int32_t>(values[i])); break;
      case Datatype::Float32: put(buf, at, static_cast<float>(values[i])); break;
      case Datatype::Float64: put(buf, at, values[i]); break;
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

}  // namespace skillroute::nifti
