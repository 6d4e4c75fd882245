#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace gsf {

// A point of R^n. Operations take spans so callers can pass vectors,
// arrays or stack buffers without copying.
using Point = std::span<const double>;
using Vec = std::vector<double>;

// Upper bound on the spatial dimension handled by the dual-number evaluator.
inline constexpr int kMaxDim = 8;

inline double norm_sq(Point x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double norm(Point x) { return std::sqrt(norm_sq(x)); }

}  // namespace gsf
