#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tetmf {

using Vec3 = std::array<double, 3>;
// Row-major 3x3.
using Mat3 = std::array<double, 9>;

using index_t = std::uint32_t;

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or operator sizes that do not fit together.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Iterative methods that break down or fail to converge, singular matrices.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline double det(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

/// Inverse transpose, valid for det(m) != 0.
inline Mat3 inverse_transpose(const Mat3& m) {
  const double d = det(m);
  const double s = 1.0 / d;
  // cofactor matrix divided by det equals inv(m)^T
  return {(m[4] * m[8] - m[5] * m[7]) * s, -(m[3] * m[8] - m[5] * m[6]) * s, (m[3] * m[7] - m[4] * m[6]) * s,
          -(m[1] * m[8] - m[2] * m[7]) * s, (m[0] * m[8] - m[2] * m[6]) * s, -(m[0] * m[7] - m[1] * m[6]) * s,
          (m[1] * m[5] - m[2] * m[4]) * s, -(m[0] * m[5] - m[2] * m[3]) * s, (m[0] * m[4] - m[1] * m[3]) * s};
}

inline Vec3 matvec(const Mat3& m, const Vec3& v) {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

inline Vec3 matvec_transpose(const Mat3& m, const Vec3& v) {
  return {m[0] * v[0] + m[3] * v[1] + m[6] * v[2], m[1] * v[0] + m[4] * v[1] + m[7] * v[2],
          m[2] * v[0] + m[5] * v[1] + m[8] * v[2]};
}

}  // namespace tetmf
