#pragma once

// JSON Lines record of one annotated image:
//   {"image":"a.png","points":[[x1,y1],[x2,y2],[x3,y3]]}

#include <array>
#include <istream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "trimask/errors.hpp"
#include "trimask/mask_generation.hpp"

namespace trimask {

struct AnnotationRecord {
  std::string image;
  std::array<ClickPoint, 3> points{};

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

inline AnnotationRecord parse_annotation(std::string_view line) {
  using nlohmann::json;
  const auto bad = [](const std::string& why) {
    return Error(ErrorCode::kInvalidArgument, "bad annotation record: " + why);
  };
  json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw bad("not a JSON object");
  if (!doc.contains("image") || !doc["image"].is_string()) throw bad("missing \"image\" string");
  if (!doc.contains("points") || !doc["points"].is_array() || doc["points"].size() != 3) {
    throw bad("\"points\" must hold exactly 3 pairs");
  }
  AnnotationRecord rec;
  rec.image = doc["image"].get<std::string>();
  if (rec.image.empty()) throw bad("empty image name");
  for (std::size_t k = 0; k < 3; ++k) {
    const json& pair = doc["points"][k];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer()) {
      throw bad("point " + std::to_string(k + 1) + " is not an integer [x, y] pair");
    }
    rec.points[k] = {pair[0].get<std::int64_t>(), pair[1].get<std::int64_t>()};
  }
  return rec;
}

inline std::string format_annotation(const AnnotationRecord& rec) {
  nlohmann::json doc;
  doc["image"] = rec.image;
  doc["points"] = nlohmann::json::array();
  for (const auto& p : rec.points) doc["points"].push_back({p.x, p.y});
  return doc.dump();
}

}  // namespace trimask
