#pragma once

#include <string>

namespace seedbank::io {

// Fixed text rendering for doubles so that repeated runs with the same seed
// produce byte-identical files. Integral values print without an exponent.
std::string fmt_double(double x);

}  // namespace seedbank::io
