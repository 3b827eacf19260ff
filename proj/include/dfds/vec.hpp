#pragma once

// Small dense-vector helpers shared by every module. Points and directions
// are plain std::vector<double>; no linear-algebra library is warranted for
// dot/norm/axpy on short vectors.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfds {

using Vec = std::vector<double>;

inline void require_same_dim(const Vec& a, const Vec& b, const char* where) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

inline double dot(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double distance(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Vec sub(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "sub");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec add(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "add");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

// a + t*b
inline Vec axpy(const Vec& a, double t, const Vec& b) {
  require_same_dim(a, b, "axpy");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * b[i];
  return r;
}

// a += t*b
inline void axpy_inplace(Vec& a, double t, const Vec& b) {
  require_same_dim(a, b, "axpy_inplace");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += t * b[i];
}

inline Vec scale(double t, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = t * a[i];
  return r;
}

}  // namespace dfds
