#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "trimask/annotations.hpp"
#include "trimask/binary_mask.hpp"
#include "trimask/errors.hpp"
#include "trimask/files.hpp"
#include "trimask/image_io.hpp"
#include "trimask/mask_generation.hpp"

namespace trimask {

enum class SessionState { kAwaitingPoints, kMaskReady, kFinished };

inline std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::kAwaitingPoints: return "AwaitingPoints";
    case SessionState::kMaskReady: return "MaskReady";
    case SessionState::kFinished: return "Finished";
  }
  return "Unknown";
}

enum class EventKind { kPointAccepted, kPointRejected, kPointUndone, kMaskGenerated, kAdvanced, kFinished };

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPointAccepted: return "PointAccepted";
    case EventKind::kPointRejected: return "PointRejected";
    case EventKind::kPointUndone: return "PointUndone";
    case EventKind::kMaskGenerated: return "MaskGenerated";
    case EventKind::kAdvanced: return "Advanced";
    case EventKind::kFinished: return "Finished";
  }
  return "Unknown";
}

struct SessionEvent {
  EventKind kind = EventKind::kPointAccepted;
  /// PointRejected: "out_of_bounds" or "degenerate".
  std::string reason;
  /// MaskGenerated only.
  std::optional<BinaryMask> mask;
  std::filesystem::path mask_path;
};

/// One pass over an image queue: collect three clicks per image, write the
/// mask on the third, then advance. Single-writer; callers serialize access.
///
/// Only the current image's header is read; pixel data is never held, so
/// memory stays flat for large folders.
class Session {
 public:
  struct Options {
    /// Append each completed triple to `<output_dir>/annotations.jsonl`.
    bool record_annotations = false;
  };

  static constexpr const char* kAnnotationsFile = "annotations.jsonl";

  /// `input` is a single image or a folder scanned with list_images.
  static Session start(const std::filesystem::path& input, const std::filesystem::path& output_dir,
                       Options options) {
    std::error_code ec;
    if (!std::filesystem::exists(input, ec)) {
      throw Error(ErrorCode::kNotFound, "input " + input.string() + " does not exist");
    }
    Session s;
    s.options_ = options;
    s.output_dir_ = output_dir;
    if (std::filesystem::is_directory(input)) {
      s.images_ = list_images(input);
      if (s.images_.empty()) {
        throw Error(ErrorCode::kNoImagesFound, "no png/jpg/jpeg images in " + input.string());
      }
    } else {
      s.images_ = {input};
    }
    ensure_output_dir(output_dir);
    return s;
  }

  static Session start(const std::filesystem::path& input, const std::filesystem::path& output_dir) {
    return start(input, output_dir, Options{});
  }

  SessionEvent add_point(std::int64_t x, std::int64_t y) {
    require(SessionState::kAwaitingPoints, "add_point");
    const ClickPoint click{x, y};
    if (!in_bounds(click, current_image_size())) {
      return log({EventKind::kPointRejected, "out_of_bounds", std::nullopt, {}});
    }
    pending_.push_back(click);
    if (pending_.size() < 3) return log({EventKind::kPointAccepted, {}, std::nullopt, {}});

    const std::array<ClickPoint, 3> triple{pending_[0], pending_[1], pending_[2]};
    std::optional<BinaryMask> mask;
    try {
      mask = mask_from_clicks(triple, current_image_size());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateTriangle) {
        pending_.pop_back();
        throw;
      }
      pending_.clear();
      return log({EventKind::kPointRejected, "degenerate", std::nullopt, {}});
    }

    std::filesystem::path written;
    try {
      written = save_mask_artifact({current_image().filename().string(), *mask}, output_dir_);
      if (options_.record_annotations) record(triple);
    } catch (...) {
      pending_.pop_back();
      throw;
    }
    pending_.clear();
    state_ = SessionState::kMaskReady;
    current_mask_ = mask;
    ++masks_written_;
    return log({EventKind::kMaskGenerated, {}, std::move(mask), written});
  }

  SessionEvent undo_point() {
    require(SessionState::kAwaitingPoints, "undo_point");
    if (pending_.empty()) throw Error(ErrorCode::kNothingToUndo, "no pending point to undo");
    pending_.pop_back();
    return log({EventKind::kPointUndone, {}, std::nullopt, {}});
  }

  SessionEvent advance() {
    require(SessionState::kMaskReady, "advance");
    ++cursor_;
    pending_.clear();
    current_mask_.reset();
    current_size_.reset();
    if (cursor_ >= images_.size()) {
      state_ = SessionState::kFinished;
      return log({EventKind::kFinished, {}, std::nullopt, {}});
    }
    state_ = SessionState::kAwaitingPoints;
    return log({EventKind::kAdvanced, {}, std::nullopt, {}});
  }

  /// Always succeeds. Masks already written stay on disk; pending points are dropped.
  SessionEvent terminate() {
    pending_.clear();
    current_mask_.reset();
    current_size_.reset();
    state_ = SessionState::kFinished;
    return log({EventKind::kFinished, {}, std::nullopt, {}});
  }

  SessionState state() const noexcept { return state_; }
  const std::vector<std::filesystem::path>& images() const noexcept { return images_; }
  std::size_t cursor() const noexcept { return cursor_; }
  const std::vector<ClickPoint>& pending() const noexcept { return pending_; }
  const std::filesystem::path& output_dir() const noexcept { return output_dir_; }
  std::size_t masks_written() const noexcept { return masks_written_; }
  const std::vector<EventKind>& history() const noexcept { return history_; }

  /// Mask of the current image while in MaskReady.
  const std::optional<BinaryMask>& current_mask() const noexcept { return current_mask_; }

  const std::filesystem::path& current_image() const {
    if (cursor_ >= images_.size()) throw Error(ErrorCode::kWrongState, "session has no current image");
    return images_[cursor_];
  }

  /// Header-only probe, cached until the cursor moves.
  ImageSize current_image_size() {
    if (!current_size_) current_size_ = probe_image_size(read_file(current_image()));
    return *current_size_;
  }

 private:
  Session() = default;

  void require(SessionState wanted, const char* op) const {
    if (state_ != wanted) {
      throw Error(ErrorCode::kWrongState, std::string(op) + " not allowed in state " +
                                              std::string(to_string(state_)));
    }
  }

  SessionEvent log(SessionEvent event) {
    history_.push_back(event.kind);
    return event;
  }

  void record(const std::array<ClickPoint, 3>& triple) const {
    std::ofstream out(output_dir_ / kAnnotationsFile, std::ios::app);
    if (!out) throw Error(ErrorCode::kOutputNotWritable, "cannot append annotations file");
    out << format_annotation({current_image().filename().string(), triple}) << '\n';
  }

  Options options_;
  std::vector<std::filesystem::path> images_;
  std::size_t cursor_ = 0;
  std::vector<ClickPoint> pending_;
  std::filesystem::path output_dir_;
  SessionState state_ = SessionState::kAwaitingPoints;
  std::optional<BinaryMask> current_mask_;
  std::optional<ImageSize> current_size_;
  std::size_t masks_written_ = 0;
  std::vector<EventKind> history_;
};

}  // namespace trimask
