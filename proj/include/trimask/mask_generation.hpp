#pragma once

#include <array>
#include <cstdint>

#include "trimask/binary_mask.hpp"
#include "trimask/geometry.hpp"
#include "trimask/image_io.hpp"
#include "trimask/rasterizer.hpp"

namespace trimask {

/// Integer click in source-image pixel space.
struct ClickPoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend bool operator==(const ClickPoint&, const ClickPoint&) = default;
};

inline bool in_bounds(ClickPoint p, ImageSize size) {
  return p.x >= 0 && p.y >= 0 && p.x < size.width && p.y < size.height;
}

/// Three clicks -> validated triangle through the clicked pixel centers ->
/// scanline mask. Throws OutOfBounds or DegenerateTriangle.
inline BinaryMask mask_from_clicks(const std::array<ClickPoint, 3>& clicks, ImageSize size) {
  const Triangle tri = validate_triangle(click_to_vertex(clicks[0].x, clicks[0].y),
                                         click_to_vertex(clicks[1].x, clicks[1].y),
                                         click_to_vertex(clicks[2].x, clicks[2].y), size.width,
                                         size.height);
  return rasterize_scanline(tri, RasterConfig{size.width, size.height, kDefaultEps});
}

}  // namespace trimask
