#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "trimask/errors.hpp"

namespace trimask {

/// Continuous coordinate in image pixel space. Origin is the top-left corner,
/// x grows along columns and y along rows.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Triangle {
  Point2 p1;
  Point2 p2;
  Point2 p3;
};

struct BarycentricCoords {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// |signed area| below this is treated as collinear (pixel^2).
inline constexpr double kDegenerateArea = 1e-9;
/// Default tolerance on barycentric weights for boundary-inclusive membership.
inline constexpr double kDefaultEps = 1e-9;

/// Twice the signed area of (o, a, b).
inline double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline double signed_area(const Triangle& tri) {
  return 0.5 * cross(tri.p1, tri.p2, tri.p3);
}

inline bool is_degenerate(const Triangle& tri) {
  return !(std::abs(signed_area(tri)) >= kDegenerateArea);
}

inline double perimeter(const Triangle& tri) {
  auto len = [](Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); };
  return len(tri.p1, tri.p2) + len(tri.p2, tri.p3) + len(tri.p3, tri.p1);
}

inline Point2 centroid(const Triangle& tri) {
  return {(tri.p1.x + tri.p2.x + tri.p3.x) / 3.0, (tri.p1.y + tri.p2.y + tri.p3.y) / 3.0};
}

/// An integer click lands on the center of the clicked pixel.
inline Point2 click_to_vertex(std::int64_t x, std::int64_t y) {
  return {static_cast<double>(x) + 0.5, static_cast<double>(y) + 0.5};
}

inline Point2 pixel_center(std::int64_t column, std::int64_t row) {
  return click_to_vertex(column, row);
}

namespace detail {

[[noreturn]] inline void throw_degenerate() {
  throw Error(ErrorCode::kDegenerateTriangle, "triangle vertices are collinear");
}

// Weights are evaluated against the vertices in lexicographic order so that
// every permutation of the same three points runs the exact same arithmetic.
// This makes membership bit-for-bit independent of click order.
class BarycentricFrame {
 public:
  explicit BarycentricFrame(const Triangle& tri) {
    if (is_degenerate(tri)) throw_degenerate();
    const std::array<Point2, 3> given{tri.p1, tri.p2, tri.p3};
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return given[a].x != given[b].x ? given[a].x < given[b].x : given[a].y < given[b].y;
    });
    for (int k = 0; k < 3; ++k) {
      sorted_[k] = given[order[k]];
      slot_[k] = order[k];
    }
    denom_ = cross(sorted_[0], sorted_[1], sorted_[2]);
  }

  /// Weights in the caller's vertex order.
  BarycentricCoords coords(Point2 p) const {
    const std::array<double, 3> w = sorted_weights(p);
    std::array<double, 3> out{};
    for (int k = 0; k < 3; ++k) out[slot_[k]] = w[k];
    return {out[0], out[1], out[2]};
  }

  bool contains(Point2 p, double eps) const {
    const std::array<double, 3> w = sorted_weights(p);
    return w[0] >= -eps && w[1] >= -eps && w[2] >= -eps;
  }

 private:
  std::array<double, 3> sorted_weights(Point2 p) const {
    return {cross(p, sorted_[1], sorted_[2]) / denom_,
            cross(p, sorted_[2], sorted_[0]) / denom_,
            cross(p, sorted_[0], sorted_[1]) / denom_};
  }

  std::array<Point2, 3> sorted_{};
  std::array<int, 3> slot_{};
  double denom_ = 0.0;
};

}  // namespace detail

/// Area-ratio barycentric weights of p; works for either winding.
inline BarycentricCoords barycentric(Point2 p, const Triangle& tri) {
  return detail::BarycentricFrame(tri).coords(p);
}

/// Boundary-inclusive membership: every weight >= -eps.
inline bool contains(const Triangle& tri, Point2 p, double eps = kDefaultEps) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be non-negative");
  return detail::BarycentricFrame(tri).contains(p, eps);
}

/// Checks bounds (x in [0,width), y in [0,height)) then non-collinearity.
/// Vertex order is kept as given.
inline Triangle validate_triangle(Point2 p1, Point2 p2, Point2 p3, std::int64_t width,
                                  std::int64_t height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be at least 1x1");
  }
  const auto w = static_cast<double>(width);
  const auto h = static_cast<double>(height);
  for (const Point2& p : {p1, p2, p3}) {
    if (!(p.x >= 0.0 && p.x < w && p.y >= 0.0 && p.y < h)) {
      throw Error(ErrorCode::kOutOfBounds,
                  "vertex (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") outside " + std::to_string(width) + "x" + std::to_string(height) +
                      " image");
    }
  }
  Triangle tri{p1, p2, p3};
  if (is_degenerate(tri)) detail::throw_degenerate();
  return tri;
}

}  // namespace trimask
