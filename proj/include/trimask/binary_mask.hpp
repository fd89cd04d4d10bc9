#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trimask/errors.hpp"

namespace trimask {

/// Row-major grid of {0,1}. Foreground (1) marks the drivable region.
class BinaryMask {
 public:
  BinaryMask() = default;

  BinaryMask(std::int64_t width, std::int64_t height)
      : width_(checked_dim(width)), height_(checked_dim(height)),
        cells_(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), 0) {}

  BinaryMask(std::int64_t width, std::int64_t height, std::vector<std::uint8_t> cells)
      : width_(checked_dim(width)), height_(checked_dim(height)), cells_(std::move(cells)) {
    if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
      throw Error(ErrorCode::kDimensionMismatch, "mask data length does not match width*height");
    }
    if (std::any_of(cells_.begin(), cells_.end(), [](std::uint8_t v) { return v > 1; })) {
      throw Error(ErrorCode::kNotBinary, "mask cells must be 0 or 1");
    }
  }

  std::int64_t width() const noexcept { return width_; }
  std::int64_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }

  std::uint8_t at(std::int64_t column, std::int64_t row) const {
    return cells_[index(column, row)];
  }
  void set(std::int64_t column, std::int64_t row, bool on) {
    cells_[index(column, row)] = on ? 1 : 0;
  }
  /// Sets columns [first, last] of one row.
  void fill_span(std::int64_t row, std::int64_t first, std::int64_t last) {
    if (first > last) return;
    auto begin = cells_.begin() + static_cast<std::ptrdiff_t>(index(first, row));
    std::fill(begin, begin + (last - first + 1), std::uint8_t{1});
  }

  std::span<const std::uint8_t> cells() const noexcept { return cells_; }

  std::size_t foreground_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
  }

  bool same_shape(const BinaryMask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  static std::int64_t checked_dim(std::int64_t v) {
    if (v < 1) throw Error(ErrorCode::kInvalidArgument, "mask dimensions must be at least 1x1");
    return v;
  }
  std::size_t index(std::int64_t column, std::int64_t row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(column);
  }

  std::int64_t width_ = 0;
  std::int64_t height_ = 0;
  std::vector<std::uint8_t> cells_;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Interleaved 8-bit RGB raster.
struct RgbImage {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint8_t> data;  // width * height * 3

  Rgb pixel(std::int64_t column, std::int64_t row) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                               static_cast<std::size_t>(column));
    return {data[i], data[i + 1], data[i + 2]};
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Alpha-blends `color` over the foreground pixels of `image`.
inline RgbImage overlay_preview(const RgbImage& image, const BinaryMask& mask, Rgb color,
                                double alpha) {
  if (image.width != mask.width() || image.height != mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "image and mask dimensions differ");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0,1]");
  }
  RgbImage out = image;
  const auto blend = [alpha](std::uint8_t c, std::uint8_t target) {
    const double v = (1.0 - alpha) * c + alpha * target;
    return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
  };
  const auto cells = mask.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) continue;
    out.data[3 * i] = blend(out.data[3 * i], color.r);
    out.data[3 * i + 1] = blend(out.data[3 * i + 1], color.g);
    out.data[3 * i + 2] = blend(out.data[3 * i + 2], color.b);
  }
  return out;
}

}  // namespace trimask
