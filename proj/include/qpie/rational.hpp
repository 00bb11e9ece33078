#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qpie {

/// Exact arbitrary-precision rational. All kernel arithmetic is carried out
/// in this type; floating point appears only at the solver and simulation
/// boundary.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

/// Parses "num" or "num/den".
inline Rat rat_from_string(const std::string& text) {
  Rat r;
  if (r.set_str(text, 10) != 0)
    throw std::invalid_argument("bad rational literal: " + text);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rat& r) { return r.get_str(); }

}  // namespace qpie
