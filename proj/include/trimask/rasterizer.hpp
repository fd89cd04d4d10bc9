#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "trimask/binary_mask.hpp"
#include "trimask/errors.hpp"
#include "trimask/geometry.hpp"

namespace trimask {

struct RasterConfig {
  std::int64_t width = 1;
  std::int64_t height = 1;
  double eps = kDefaultEps;

  static constexpr std::int64_t kMaxPixels = std::int64_t{1} << 31;

  void validate() const {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be at least 1x1");
    }
    if (width > kMaxPixels / height) {
      throw Error(ErrorCode::kInvalidArgument, "raster exceeds 2^31 pixels");
    }
    if (!(eps >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be non-negative");
  }
};

/// Reference rasterizer: tests every pixel center against the triangle.
inline BinaryMask rasterize_oracle(const Triangle& tri, const RasterConfig& cfg) {
  cfg.validate();
  if (is_degenerate(tri)) detail::throw_degenerate();
  BinaryMask mask(cfg.width, cfg.height);
  for (std::int64_t row = 0; row < cfg.height; ++row) {
    for (std::int64_t column = 0; column < cfg.width; ++column) {
      if (contains(tri, pixel_center(column, row), cfg.eps)) mask.set(column, row, true);
    }
  }
  return mask;
}

namespace detail {

// lambda_k(x, y) = a*x + b*y + c for one barycentric weight.
struct AffineWeight {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline std::array<AffineWeight, 3> affine_weights(const Triangle& tri) {
  const std::array<Point2, 3> v{tri.p1, tri.p2, tri.p3};
  const double denom = cross(v[0], v[1], v[2]);
  std::array<AffineWeight, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const Point2 a = v[(k + 1) % 3];
    const Point2 b = v[(k + 2) % 3];
    out[k] = {(a.y - b.y) / denom, (b.x - a.x) / denom, (a.x * b.y - a.y * b.x) / denom};
  }
  return out;
}

inline std::int64_t clamp_index(double v, std::int64_t lo, std::int64_t hi) {
  if (!(v > static_cast<double>(lo))) return lo;
  if (!(v < static_cast<double>(hi))) return hi;
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

/// Scanline fill sampled at pixel centers. Each row's span comes from the
/// affine barycentric weights; the two span ends are then settled with the
/// same membership predicate the oracle uses, so the result matches
/// rasterize_oracle pixel for pixel. Rows outside the triangle's vertical
/// extent are never visited.
inline BinaryMask rasterize_scanline(const Triangle& tri, const RasterConfig& cfg) {
  cfg.validate();
  const detail::BarycentricFrame frame(tri);
  const auto weights = detail::affine_weights(tri);
  const std::int64_t w = cfg.width;
  const double eps = cfg.eps;

  BinaryMask mask(cfg.width, cfg.height);

  // The eps-inclusive region is the triangle scaled about its centroid by
  // (1 + 3 eps); pad the vertical extent by that growth plus rounding slack.
  const double diameter =
      std::max({std::hypot(tri.p2.x - tri.p1.x, tri.p2.y - tri.p1.y),
                std::hypot(tri.p3.x - tri.p2.x, tri.p3.y - tri.p2.y),
                std::hypot(tri.p1.x - tri.p3.x, tri.p1.y - tri.p3.y)});
  const double pad = 3.0 * eps * diameter + 1e-6;
  const double y_min = std::min({tri.p1.y, tri.p2.y, tri.p3.y}) - pad;
  const double y_max = std::max({tri.p1.y, tri.p2.y, tri.p3.y}) + pad;
  const std::int64_t first_row =
      detail::clamp_index(std::ceil(y_min - 0.5), 0, cfg.height);
  const std::int64_t last_row =
      detail::clamp_index(std::floor(y_max - 0.5), -1, cfg.height - 1);

  const auto inside = [&](std::int64_t column, double y) {
    return frame.contains({static_cast<double>(column) + 0.5, y}, eps);
  };

  for (std::int64_t row = first_row; row <= last_row; ++row) {
    const double y = static_cast<double>(row) + 0.5;
    double left = -std::numeric_limits<double>::infinity();
    double right = std::numeric_limits<double>::infinity();
    bool row_empty = false;
    for (const auto& lw : weights) {
      const double bound = -eps - lw.b * y - lw.c;  // need a*x >= bound
      if (lw.a > 0.0) {
        left = std::max(left, bound / lw.a);
      } else if (lw.a < 0.0) {
        right = std::min(right, bound / lw.a);
      } else if (bound > 1e-9) {
        row_empty = true;
      }
    }
    if (row_empty) continue;

    // Centers x = i + 0.5 inside [left, right].
    std::int64_t lo = detail::clamp_index(std::ceil(left - 0.5), 0, w - 1);
    std::int64_t hi = detail::clamp_index(std::floor(right - 0.5), 0, w - 1);

    if (lo > hi) {
      // Span estimate falls between two centers; probe its neighbours.
      const std::int64_t from = std::max<std::int64_t>(0, hi - 1);
      const std::int64_t to = std::min(w - 1, lo + 1);
      std::int64_t hit = -1;
      for (std::int64_t i = from; i <= to && hit < 0; ++i) {
        if (inside(i, y)) hit = i;
      }
      if (hit < 0) continue;
      lo = hi = hit;
    }

    if (inside(lo, y)) {
      while (lo > 0 && inside(lo - 1, y)) --lo;
    } else {
      while (lo <= hi && !inside(lo, y)) ++lo;
    }
    if (inside(hi, y)) {
      while (hi < w - 1 && inside(hi + 1, y)) ++hi;
    } else {
      while (hi >= lo && !inside(hi, y)) --hi;
    }
    mask.fill_span(row, lo, hi);
  }
  return mask;
}

}  // namespace trimask
