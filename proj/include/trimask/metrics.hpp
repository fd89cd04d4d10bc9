#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "trimask/binary_mask.hpp"
#include "trimask/errors.hpp"

namespace trimask {

namespace detail {

struct PairCounts {
  std::size_t both_fg = 0;
  std::size_t both_bg = 0;
  std::size_t only_a = 0;
  std::size_t only_b = 0;

  std::size_t total() const { return both_fg + both_bg + only_a + only_b; }
};

inline PairCounts count_pairs(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "masks differ in size: " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
  PairCounts c;
  const auto ca = a.cells();
  const auto cb = b.cells();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i] && cb[i]) ++c.both_fg;
    else if (!ca[i] && !cb[i]) ++c.both_bg;
    else if (ca[i]) ++c.only_a;
    else ++c.only_b;
  }
  return c;
}

// Empty union counts as perfect agreement.
inline double ratio_or_one(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline double fg_iou(const PairCounts& c) {
  return ratio_or_one(c.both_fg, c.both_fg + c.only_a + c.only_b);
}
inline double bg_iou(const PairCounts& c) {
  return ratio_or_one(c.both_bg, c.both_bg + c.only_a + c.only_b);
}

}  // namespace detail

/// Foreground intersection over union; 1.0 when both masks are empty.
inline double iou(const BinaryMask& a, const BinaryMask& b) {
  return detail::fg_iou(detail::count_pairs(a, b));
}

inline double pixel_accuracy(const BinaryMask& a, const BinaryMask& b) {
  const auto c = detail::count_pairs(a, b);
  return detail::ratio_or_one(c.both_fg + c.both_bg, c.total());
}

/// Mean of foreground and background IoU.
inline double miou(const BinaryMask& a, const BinaryMask& b) {
  const auto c = detail::count_pairs(a, b);
  return 0.5 * (detail::fg_iou(c) + detail::bg_iou(c));
}

struct NamedMaskPair {
  std::string name;
  BinaryMask pred;
  BinaryMask ref;
};

/// Aggregate accuracy is micro-averaged over all pixels; aggregate mIoU is
/// the macro mean of per-image mIoU.
struct MaskReport {
  std::vector<std::pair<std::string, double>> per_image;  // foreground IoU
  double pixel_accuracy = 1.0;
  double miou = 1.0;
  std::size_t image_count = 0;
  /// Set when there was nothing to evaluate and the aggregates are vacuous.
  bool empty_warning = false;
};

inline MaskReport eval_pairs(const std::vector<NamedMaskPair>& pairs) {
  MaskReport report;
  report.image_count = pairs.size();
  if (pairs.empty()) {
    report.empty_warning = true;
    return report;
  }
  std::size_t agree = 0;
  std::size_t total = 0;
  double miou_sum = 0.0;
  for (const auto& pair : pairs) {
    detail::PairCounts c;
    try {
      c = detail::count_pairs(pair.pred, pair.ref);
    } catch (const Error& e) {
      throw Error(ErrorCode::kDimensionMismatch, pair.name + ": " + e.what());
    }
    report.per_image.emplace_back(pair.name, detail::fg_iou(c));
    agree += c.both_fg + c.both_bg;
    total += c.total();
    miou_sum += 0.5 * (detail::fg_iou(c) + detail::bg_iou(c));
  }
  report.pixel_accuracy = detail::ratio_or_one(agree, total);
  report.miou = miou_sum / static_cast<double>(pairs.size());
  return report;
}

}  // namespace trimask
