#ifndef NEWTONBO_SOBOL_DIRECTIONS_HPP
#define NEWTONBO_SOBOL_DIRECTIONS_HPP

#include <array>
#include <cstdint>

namespace newtonbo::detail {

inline constexpr int kSobolMaxDim = 1024;

struct SobolDirection {
  std::uint32_t poly;    // primitive polynomial incl. leading and trailing bits
  int degree;
  std::array<std::uint32_t, 13> m;  // initial direction integers
};

extern const std::array<SobolDirection, kSobolMaxDim> kSobolDirections;

}  // namespace newtonbo::detail

#endif  // NEWTONBO_SOBOL_DIRECTIONS_HPP
