// SVOL: a line-oriented "key: value" header terminated by a blank line,
// followed by a little-endian float64 (scalar) or uint8 (label/mask) payload.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "skillroute/volume_io.hpp"

namespace skillroute::svol {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kMagic = "SVOL1";

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::Scalar: return "scalar";
    case Kind::Label: return "label";
    case Kind::Mask: return "mask";
  }
  return "scalar";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
std::vector<T> parse_triple(const std::string& text, std::string_view key) {
  std::istringstream in(text);
  std::vector<T> out;
  T v;
  while (in >> v) out.push_back(v);
  if (out.size() != 3 || !in.eof()) {
    throw Error(ErrorCode::MalformedHeader, "SVOL '" + std::string(key) + "' needs 3 values");
  }
  return out;
}

}  // namespace

Contents read(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorCode::FileNotFound, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  const std::vector<char> buf{std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>()};

  std::map<std::string, std::string> fields;
  std::size_t pos = 0;
  bool terminated = false;
  bool first = true;
  while (pos < buf.size()) {
    const auto nl = std::find(buf.begin() + static_cast<std::ptrdiff_t>(pos), buf.end(), '\n');
    if (nl == buf.end()) break;
    const auto end = static_cast<std::size_t>(nl - buf.begin());
    std::string line = trim(std::string_view(buf.data() + pos, end - pos));
    pos = end + 1;
    if (line.empty()) {
      terminated = true;
      break;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::MalformedHeader, "SVOL header line without ':' in " + path.string());
    }
    std::string key = trim(std::string_view(line).substr(0, colon));
    std::string value = trim(std::string_view(line).substr(colon + 1));
    if (first && (key != "magic" || value != kMagic)) {
      throw Error(ErrorCode::MalformedHeader, "bad SVOL magic in " + path.string());
    }
    first = false;
    fields[key] = value;
  }
  if (!terminated || first) {
    throw Error(ErrorCode::MalformedHeader, "unterminated SVOL header in " + path.string());
  }
  for (const char* key : {"dims", "spacing", "kind"}) {
    if (!fields.contains(key)) {
      throw Error(ErrorCode::MalformedHeader, std::string("SVOL header missing '") + key + "'");
    }
  }

  Contents c;
  const auto dims = parse_triple<long long>(fields["dims"], "dims");
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
    throw Error(ErrorCode::MalformedHeader, "SVOL dims must be positive");
  }
  const auto sp = parse_triple<double>(fields["spacing"], "spacing");
  c.raw.geometry.dims = {static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                         static_cast<std::size_t>(dims[2])};
  c.raw.geometry.spacing = {sp[0], sp[1], sp[2]};

  const std::string& kind = fields["kind"];
  if (kind == "scalar") c.kind = Kind::Scalar;
  else if (kind == "label") c.kind = Kind::Label;
  else if (kind == "mask") c.kind = Kind::Mask;
  else throw Error(ErrorCode::UnsupportedDatatype, "SVOL kind '" + kind + "'");

  const std::size_t count = c.raw.geometry.dims.voxel_count();
  const std::size_t elem = c.kind == Kind::Scalar ? 8 : 1;
  if (buf.size() - pos != count * elem) {
    throw Error(ErrorCode::MalformedHeader, "SVOL payload size does not match dims");
  }
  c.raw.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (elem == 1) {
      c.raw.values[i] = static_cast<unsigned char>(buf[pos + i]);
    } else {
      std::array<unsigned char, 8> bytes;
      std::memcpy(bytes.data(), buf.data() + pos + 8 * i, 8);
      if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
      }
      c.raw.values[i] = std::bit_cast<double>(bytes);
      if (!std::isfinite(c.raw.values[i])) throw Error(ErrorCode::NonFiniteData, path.string());
    }
  }
  return c;
}

void write(const fs::path& path, const Geometry& g, const std::vector<double>& values,
           Kind kind) {
  std::ostringstream hdr;
  hdr.precision(17);
  hdr << "magic: " << kMagic << '\n'
      << "dims: " << g.dims.nx << ' ' << g.dims.ny << ' ' << g.dims.nz << '\n'
      << "spacing: " << g.spacing.sx << ' ' << g.spacing.sy << ' ' << g.spacing.sz << '\n'
      << "kind: " << kind_name(kind) << "\n\n";
  std::string out = hdr.str();
  if (kind == Kind::Scalar) {
    for (double v : values) {
      auto bytes = std::bit_cast<std::array<char, 8>>(v);
      if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
      }
      out.append(bytes.data(), bytes.size());
    }
  } else {
    for (double v : values) out.push_back(static_cast<char>(static_cast<std::uint8_t>(v)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

}  // namespace skillroute::svol
