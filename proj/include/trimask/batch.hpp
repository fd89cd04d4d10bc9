#pragma once

// Headless pipelines behind the `apply` and `eval` commands.

#include <cstdio>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "trimask/annotations.hpp"
#include "trimask/errors.hpp"
#include "trimask/files.hpp"
#include "trimask/image_io.hpp"
#include "trimask/mask_generation.hpp"
#include "trimask/metrics.hpp"

namespace trimask {

struct ApplyFailure {
  std::size_t line = 0;  // 1-based line in the annotations file
  std::string image;     // empty when the record itself did not parse
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string message;
};

struct ApplyResult {
  std::vector<std::pair<std::string, std::filesystem::path>> written;
  std::vector<ApplyFailure> failures;

  std::size_t total() const { return written.size() + failures.size(); }
  bool ok() const { return failures.empty(); }
};

/// Replays one AnnotationRecord per non-blank line. A bad record is reported
/// and skipped; the remaining records are still written.
inline ApplyResult apply_annotations(std::istream& lines, const std::filesystem::path& images_root,
                                     const std::filesystem::path& out_dir) {
  ensure_output_dir(out_dir);
  ApplyResult result;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(lines, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    AnnotationRecord rec;
    try {
      rec = parse_annotation(text);
      const std::filesystem::path source = images_root / rec.image;
      if (!std::filesystem::is_regular_file(source)) {
        throw Error(ErrorCode::kNotFound, "image " + source.string() + " not found");
      }
      const BinaryMask mask = mask_from_clicks(rec.points, probe_image_size(read_file(source)));
      result.written.emplace_back(rec.image, save_mask_artifact({source.filename().string(), mask}, out_dir));
    } catch (const Error& e) {
      result.failures.push_back({line_no, rec.image, e.code(), e.what()});
    }
  }
  return result;
}

/// Pairs `<pred_dir>/<name>` with `<ref_dir>/<name>` over all images in both.
inline std::vector<NamedMaskPair> load_mask_pairs(const std::filesystem::path& pred_dir,
                                                  const std::filesystem::path& ref_dir) {
  std::map<std::string, std::filesystem::path> preds;
  std::map<std::string, std::filesystem::path> refs;
  for (const auto& p : list_images(pred_dir)) preds[p.filename().string()] = p;
  for (const auto& p : list_images(ref_dir)) refs[p.filename().string()] = p;

  std::string unpaired;
  for (const auto& [name, _] : preds) {
    if (!refs.count(name)) unpaired += " " + name + " (no reference)";
  }
  for (const auto& [name, _] : refs) {
    if (!preds.count(name)) unpaired += " " + name + " (no prediction)";
  }
  if (!unpaired.empty()) throw Error(ErrorCode::kUnpaired, "unpaired masks:" + unpaired);

  std::vector<NamedMaskPair> pairs;
  for (const auto& [name, pred_path] : preds) {
    pairs.push_back({name, decode_png(read_file(pred_path)), decode_png(read_file(refs[name]))});
    if (!pairs.back().pred.same_shape(pairs.back().ref)) {
      throw Error(ErrorCode::kDimensionMismatch, name + ": prediction and reference differ in size");
    }
  }
  return pairs;
}

/// `name<TAB>iou` per image, then `miou=<v> accuracy=<v>`.
inline std::string format_report(const MaskReport& report) {
  std::string out;
  char buf[128];
  for (const auto& [name, value] : report.per_image) {
    std::snprintf(buf, sizeof buf, "\t%.6f\n", value);
    out += name + buf;
  }
  std::snprintf(buf, sizeof buf, "miou=%.6f accuracy=%.6f\n", report.miou, report.pixel_accuracy);
  out += buf;
  return out;
}

}  // namespace trimask
