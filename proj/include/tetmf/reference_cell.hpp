#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "tetmf/types.hpp"

namespace tetmf {

/// Reference tetrahedron (0,0,0),(1,0,0),(0,1,0),(0,0,1), volume 1/6.
namespace ref {

inline constexpr std::array<Vec3, 4> vertices{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

/// Local edges as (lower, higher) local vertex pairs.
inline constexpr std::array<std::array<int, 2>, 6> edges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Local face i is opposite local vertex i. The vertex order fixes the face
/// parameterization x = v[0] + s (v[1] - v[0]) + t (v[2] - v[0]).
inline constexpr std::array<std::array<int, 3>, 4> faces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

/// Outward unit normals of the reference faces.
inline const std::array<Vec3, 4>& face_normals() {
  static const double s = 1.0 / std::sqrt(3.0);
  static const std::array<Vec3, 4> n{{{s, s, s}, {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
  return n;
}

/// |(v1 - v0) x (v2 - v0)| of the reference face parameterization.
inline double face_area_scale(int face) { return face == 0 ? std::sqrt(3.0) : 1.0; }

inline int edge_index(int a, int b) {
  if (a > b) std::swap(a, b);
  for (int e = 0; e < 6; ++e)
    if (edges[e][0] == a && edges[e][1] == b) return e;
  return -1;
}

/// Cell reference coordinates of the face point with triangle coordinates (s, t).
inline Vec3 face_to_cell(int face, double s, double t) {
  const auto& f = faces[face];
  const Vec3& a = vertices[f[0]];
  const Vec3& b = vertices[f[1]];
  const Vec3& c = vertices[f[2]];
  return {a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]), a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
          a[2] + s * (b[2] - a[2]) + t * (c[2] - a[2])};
}

}  // namespace ref

/// One of the six symmetries of a triangle. Code 0 is the identity, 1..2 are
/// rotations, 3..5 reflections. For an interior face the plus-side vertex i
/// coincides with the minus-side vertex perm()[i].
class FaceOrientation {
 public:
  static constexpr int n_codes = 6;

  constexpr FaceOrientation() = default;
  constexpr explicit FaceOrientation(int code) : code_(static_cast<std::uint8_t>(code)) {}

  constexpr int code() const { return code_; }
  constexpr const std::array<int, 3>& perm() const { return table()[code_]; }

  /// (a.compose(b)).perm()[i] == a.perm()[b.perm()[i]]
  constexpr FaceOrientation compose(FaceOrientation other) const {
    std::array<int, 3> p{perm()[other.perm()[0]], perm()[other.perm()[1]], perm()[other.perm()[2]]};
    return from_perm(p);
  }
  constexpr FaceOrientation inverse() const {
    std::array<int, 3> p{};
    for (int i = 0; i < 3; ++i) p[perm()[i]] = i;
    return from_perm(p);
  }

  static constexpr FaceOrientation from_perm(const std::array<int, 3>& p) {
    for (int c = 0; c < n_codes; ++c)
      if (table()[c] == p) return FaceOrientation(c);
    return FaceOrientation(0);
  }

  friend constexpr bool operator==(FaceOrientation a, FaceOrientation b) { return a.code_ == b.code_; }

 private:
  static constexpr const std::array<std::array<int, 3>, 6>& table() { return table_; }
  static constexpr std::array<std::array<int, 3>, 6> table_{
      {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
  std::uint8_t code_ = 0;
};

/// Triangle coordinates on the plus side of the point that has coordinates
/// (s, t) on the minus side of a face with orientation o.
inline std::array<double, 2> plus_side_point(FaceOrientation o, double s, double t) {
  const std::array<double, 3> lambda{1.0 - s - t, s, t};
  const auto& p = o.perm();
  // plus vertex i sits at minus vertex p[i]
  return {lambda[p[1]], lambda[p[2]]};
}

}  // namespace tetmf
