#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <string>
#include <system_error>
#include <vector>

#include "trimask/binary_mask.hpp"
#include "trimask/errors.hpp"
#include "trimask/image_io.hpp"

namespace trimask {

namespace fs = std::filesystem;

/// png, jpg or jpeg in any letter case.
inline bool has_image_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

/// Image files directly inside `dir`, sorted by filename bytes.
inline std::vector<fs::path> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kNotADirectory, dir.string() + " is not a directory");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return out;
}

/// Creates the directory (and parents) when missing.
inline void ensure_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kOutputNotWritable,
                "cannot create output directory " + dir.string() +
                    (ec ? ": " + ec.message() : std::string()));
  }
}

inline fs::path mask_path_for(const fs::path& source_image, const fs::path& output_dir) {
  return output_dir / (source_image.stem().string() + "_mask.png");
}

struct MaskArtifact {
  std::string source_image_name;
  BinaryMask mask;
  std::chrono::system_clock::time_point created_at = std::chrono::system_clock::now();
};

/// Writes `<stem>_mask.png` into output_dir, overwriting an older mask.
inline fs::path save_mask_artifact(const MaskArtifact& artifact, const fs::path& output_dir) {
  if (artifact.source_image_name.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mask artifact needs a source image name");
  }
  ensure_output_dir(output_dir);
  const fs::path target = mask_path_for(artifact.source_image_name, output_dir);
  write_file(target, encode_png(artifact.mask));
  return target;
}

}  // namespace trimask
