#pragma once

// Local HTTP front end for annotation sessions.
//
//   POST /api/sessions                 {input_dir, output_dir} -> 201 SessionView
//   GET  /api/sessions/{id}            -> SessionView
//   GET  /api/sessions/{id}/image      -> current source image bytes
//   POST /api/sessions/{id}/points     {x, y} -> {event, session, mask_preview_url?}
//   GET  /api/sessions/{id}/preview    -> PNG overlay of the pending mask
//   POST /api/sessions/{id}/advance | /undo | /terminate -> SessionView
//
// Errors are JSON: {"error": <code>, "reason": <text>}. Paths in requests
// must resolve under the configured root.

// The library default backlog of 5 drops connections when a browser and
// scripted clients post in bursts.
#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#endif
#include <httplib.h>

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "trimask/binary_mask.hpp"
#include "trimask/errors.hpp"
#include "trimask/image_io.hpp"
#include "trimask/session.hpp"

namespace trimask {

struct ServiceConfig {
  std::filesystem::path root = std::filesystem::current_path();
  Rgb overlay_color{255, 0, 0};
  double overlay_alpha = 0.4;
  /// Directory with the built browser UI, mounted at "/".
  std::optional<std::filesystem::path> ui_dir;
};

class AnnotationService {
 public:
  using FinishedHook = std::function<void(const std::string& session_id)>;

  explicit AnnotationService(ServiceConfig config) : config_(std::move(config)) {
    std::error_code ec;
    config_.root = std::filesystem::canonical(config_.root, ec);
    if (ec) throw Error(ErrorCode::kNotFound, "service root does not exist");
    if (!(config_.overlay_alpha >= 0.0 && config_.overlay_alpha <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "overlay alpha must lie in [0,1]");
    }
    routes();
  }

  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  /// Called (outside any lock) whenever a session reaches Finished.
  void on_finished(FinishedHook hook) { finished_hook_ = std::move(hook); }

  /// Port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }
  /// Blocks until stop().
  bool run() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

  /// Resolves `path` (relative paths are taken from the root) and rejects
  /// anything that escapes the root.
  std::filesystem::path resolve(const std::filesystem::path& path) const {
    const std::filesystem::path joined = path.is_absolute() ? path : config_.root / path;
    const std::filesystem::path resolved = std::filesystem::weakly_canonical(joined);
    const auto [root_end, _] =
        std::mismatch(config_.root.begin(), config_.root.end(), resolved.begin(), resolved.end());
    if (root_end != config_.root.end()) {
      throw Error(ErrorCode::kPathOutsideRoot, path.string() + " is outside the service root");
    }
    return resolved;
  }

  std::string create_session(const std::filesystem::path& input,
                             const std::filesystem::path& output) {
    auto entry = std::make_shared<Entry>(
        Session::start(resolve(input), resolve(output), Session::Options{true}));
    std::string id = new_id();
    std::unique_lock lock(sessions_mu_);
    sessions_.emplace(id, std::move(entry));
    return id;
  }

  nlohmann::json view(const std::string& id) {
    auto entry = find(id);
    if (!entry) throw Error(ErrorCode::kNotFound, "unknown session");
    std::shared_lock lock(entry->mu);
    return view_of(id, entry->session);
  }

 private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    std::shared_mutex mu;
    Session session;
  };

  static nlohmann::json view_of(const std::string& id, const Session& s) {
    const bool finished = s.state() == SessionState::kFinished;
    return {{"session_id", id},
            {"total_images", s.images().size()},
            {"cursor", s.cursor()},
            {"current_image_name", finished ? std::string() : s.current_image().filename().string()},
            {"pending_point_count", s.pending().size()},
            {"state", std::string(to_string(s.state()))},
            {"masks_written", s.masks_written()}};
  }

  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, std::string_view code,
                         const std::string& reason) {
    send_json(res, status, {{"error", std::string(code)}, {"reason", reason}});
  }

  static int status_for(ErrorCode code) {
    switch (code) {
      case ErrorCode::kNotFound:
      case ErrorCode::kNoImagesFound:
        return 404;
      case ErrorCode::kPathOutsideRoot:
        return 403;
      case ErrorCode::kWrongState:
      case ErrorCode::kNothingToUndo:
        return 409;
      case ErrorCode::kOutOfBounds:
      case ErrorCode::kDegenerateTriangle:
        return 422;
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kNotADirectory:
        return 400;
      default:
        return 500;
    }
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::shared_lock lock(sessions_mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  std::string new_id() {
    std::lock_guard lock(rng_mu_);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 32; ++i) id += kHex[rng_() & 0xF];
    return id;
  }

  void notify_finished(const std::string& id) {
    if (finished_hook_) finished_hook_(id);
  }

  // Runs `fn(id, entry)` for a known session and turns library errors into
  // JSON error responses.
  template <typename Fn>
  httplib::Server::Handler with_session(Fn fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      auto entry = find(id);
      if (!entry) return send_error(res, 404, "unknown_session", "no session " + id);
      try {
        fn(req, res, id, *entry);
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), to_string(e.code()), e.what());
      }
    };
  }

  template <typename Op>
  void mutate_and_view(httplib::Response& res, const std::string& id, Entry& entry, Op op) {
    bool finished = false;
    nlohmann::json body;
    {
      std::unique_lock lock(entry.mu);
      const bool was_finished = entry.session.state() == SessionState::kFinished;
      op(entry.session);
      finished = !was_finished && entry.session.state() == SessionState::kFinished;
      body = view_of(id, entry.session);
    }
    send_json(res, 200, body);
    if (finished) notify_finished(id);
  }

  void routes() {
    static constexpr const char* kId = R"(/api/sessions/([0-9a-f]+))";
    const std::string id_re = kId;

    server_.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("input_dir") ||
          !body["input_dir"].is_string() || !body.contains("output_dir") ||
          !body["output_dir"].is_string()) {
        return send_error(res, 400, "invalid_body",
                          "expected {\"input_dir\": string, \"output_dir\": string}");
      }
      try {
        const std::string id = create_session(body["input_dir"].get<std::string>(),
                                              body["output_dir"].get<std::string>());
        send_json(res, 201, view(id));
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), to_string(e.code()), e.what());
      }
    });

    server_.Get(id_re, with_session([](const httplib::Request&, httplib::Response& res,
                                       const std::string& id, Entry& entry) {
      std::shared_lock lock(entry.mu);
      send_json(res, 200, view_of(id, entry.session));
    }));

    server_.Get(id_re + "/image", with_session([](const httplib::Request&, httplib::Response& res,
                                                  const std::string&, Entry& entry) {
      Bytes bytes;
      {
        std::shared_lock lock(entry.mu);
        if (entry.session.state() == SessionState::kFinished) {
          return send_error(res, 409, "finished", "session is finished");
        }
        bytes = read_file(entry.session.current_image());
      }
      const char* type = content_type(detect_format(bytes));
      res.status = 200;
      res.set_content(std::string(bytes.begin(), bytes.end()), type);
    }));

    server_.Post(id_re + "/points", with_session([this](const httplib::Request& req,
                                                        httplib::Response& res,
                                                        const std::string& id, Entry& entry) {
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("x") ||
          !body["x"].is_number_integer() || !body.contains("y") || !body["y"].is_number_integer()) {
        return send_error(res, 400, "invalid_body", "expected {\"x\": integer, \"y\": integer}");
      }
      nlohmann::json out;
      int status = 200;
      {
        std::unique_lock lock(entry.mu);
        const SessionEvent event =
            entry.session.add_point(body["x"].get<std::int64_t>(), body["y"].get<std::int64_t>());
        out["event"] = std::string(to_string(event.kind));
        if (event.kind == EventKind::kPointRejected) {
          status = 422;
          out["error"] = event.reason;
          out["reason"] = event.reason == "degenerate"
                              ? "the three points are collinear; pending points cleared"
                              : "point lies outside the image";
        } else if (event.kind == EventKind::kMaskGenerated) {
          out["mask_preview_url"] = "/api/sessions/" + id + "/preview";
          out["mask_file"] = event.mask_path.filename().string();
        }
        out["session"] = view_of(id, entry.session);
      }
      send_json(res, status, out);
    }));

    server_.Get(id_re + "/preview", with_session([this](const httplib::Request&,
                                                        httplib::Response& res, const std::string&,
                                                        Entry& entry) {
      RgbImage image;
      BinaryMask mask;
      {
        std::shared_lock lock(entry.mu);
        if (entry.session.state() != SessionState::kMaskReady || !entry.session.current_mask()) {
          return send_error(res, 409, "no_mask", "no generated mask awaiting review");
        }
        mask = *entry.session.current_mask();
        image = decode_rgb(read_file(entry.session.current_image()));
      }
      const Bytes png =
          encode_rgb_png(overlay_preview(image, mask, config_.overlay_color, config_.overlay_alpha));
      res.status = 200;
      res.set_content(std::string(png.begin(), png.end()), "image/png");
    }));

    server_.Post(id_re + "/advance", with_session([this](const httplib::Request&,
                                                         httplib::Response& res,
                                                         const std::string& id, Entry& entry) {
      mutate_and_view(res, id, entry, [](Session& s) { s.advance(); });
    }));
    server_.Post(id_re + "/undo", with_session([this](const httplib::Request&,
                                                      httplib::Response& res, const std::string& id,
                                                      Entry& entry) {
      mutate_and_view(res, id, entry, [](Session& s) { s.undo_point(); });
    }));
    server_.Post(id_re + "/terminate", with_session([this](const httplib::Request&,
                                                           httplib::Response& res,
                                                           const std::string& id, Entry& entry) {
      mutate_and_view(res, id, entry, [](Session& s) { s.terminate(); });
    }));

    if (config_.ui_dir) {
      server_.set_mount_point("/", config_.ui_dir->string());
    } else {
      server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(
            "<!doctype html><title>trimask</title><p>trimask annotation service is running. "
            "Start it with <code>--ui &lt;dir&gt;</code> to serve the browser front end.</p>",
            "text/html");
      });
    }
  }

  ServiceConfig config_;
  httplib::Server server_;
  FinishedHook finished_hook_;
  std::shared_mutex sessions_mu_;
  std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_{std::random_device{}()};
};

}  // namespace trimask
