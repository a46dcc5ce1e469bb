#ifndef LONGSWAP_SRC_FORMAT_UTIL_HPP
#define LONGSWAP_SRC_FORMAT_UTIL_HPP

#include <cstdio>
#include <string>

namespace longswap {
namespace detail {

// Fixed significant-digit formatting for CSV output. One code path for every
// writer keeps files byte-identical across runs and thread counts.
inline std::string csv_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

}  // namespace detail
}  // namespace longswap

#endif  // LONGSWAP_SRC_FORMAT_UTIL_HPP
