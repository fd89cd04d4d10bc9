// Builds a mask from three clicks on a 64x48 frame, scores it against a
// reference and writes it next to the working directory.

#include <iostream>

#include "trimask/trimask.hpp"

int main() {
  using namespace trimask;

  const ImageSize frame{64, 48};
  // Road apex near the horizon, two corners at the bottom edge.
  const BinaryMask road = mask_from_clicks({ClickPoint{32, 10}, ClickPoint{0, 47}, ClickPoint{63, 47}},
                                           frame);
  std::cout << "foreground pixels: " << road.foreground_count() << " of " << road.size() << "\n";

  const BinaryMask narrower = mask_from_clicks(
      {ClickPoint{32, 12}, ClickPoint{8, 47}, ClickPoint{55, 47}}, frame);
  std::cout << "iou=" << iou(road, narrower) << " miou=" << miou(road, narrower)
            << " accuracy=" << pixel_accuracy(road, narrower) << "\n";

  const auto path = save_mask_artifact({"frame_0001.png", road}, "basic_usage_masks");
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}
