#include "skillroute/grid.hpp"

#include <algorithm>

namespace skillroute {

std::string to_string(const Dims& d) {
  return "(" + std::to_string(d.nx) + "," + std::to_string(d.ny) + "," + std::to_string(d.nz) +
         ")";
}

std::size_t count_true(const MaskVolume& m) {
  auto v = m.values();
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), std::uint8_t{1}));
}

}  // namespace skillroute
