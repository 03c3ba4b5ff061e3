#include "seedbank/io.hpp"

#include <cstdio>

namespace seedbank::io {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace seedbank::io
