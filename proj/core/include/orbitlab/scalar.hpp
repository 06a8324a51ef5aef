#pragma once

#include <cmath>
#include <complex>

#include "orbitlab/errors.hpp"

namespace orbitlab {

using Complex = std::complex<double>;

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_finite(const Complex& z, const char* where) {
  if (!is_finite(z)) raise(ErrorCode::ConfigError, std::string(where) + ": non-finite scalar");
}

}  // namespace orbitlab
