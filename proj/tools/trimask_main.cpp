// trimask: three-click triangle masks for drivable-region segmentation.
//
// Exit codes: 0 ok, 1 other error, 2 invalid menu choice, 3 no images found,
// 4 one or more annotation records failed, 5 unpaired or mismatched masks.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "trimask/service.hpp"
#include "trimask/trimask.hpp"

namespace fs = std::filesystem;
using namespace trimask;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBadChoice = 2;
constexpr int kExitNoImages = 3;
constexpr int kExitApplyFailed = 4;
constexpr int kExitEvalMismatch = 5;

struct WebOptions {
  bool enabled = false;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui_dir;
  double alpha = 0.4;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_click(const std::string& line, std::int64_t& x, std::int64_t& y) {
  std::string text = line;
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(text);
  std::string rest;
  return static_cast<bool>(in >> x >> y) && !(in >> rest);
}

// Windowless fallback: clicks are typed as "x y". 'u' undoes, 'q' quits.
// Masks are saved on the third point and the queue advances automatically.
int run_terminal_session(Session& session, std::istream& in, std::ostream& out) {
  const std::size_t total = session.images().size();
  while (session.state() != SessionState::kFinished) {
    if (session.pending().empty()) {
      const ImageSize size = session.current_image_size();
      out << "[" << session.cursor() + 1 << "/" << total << "] "
          << session.current_image().filename().string() << " (" << size.width << "x"
          << size.height << "): enter 'x y' three times, 'u' to undo, 'q' to quit\n";
    }
    out << "point " << session.pending().size() + 1 << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line)) {
      out << "\n";
      session.terminate();
      break;
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line == "q") {
      session.terminate();
      break;
    }
    if (line == "u") {
      try {
        session.undo_point();
        out << "removed last point\n";
      } catch (const Error& e) {
        out << "nothing to undo\n";
      }
      continue;
    }
    std::int64_t x = 0;
    std::int64_t y = 0;
    if (!parse_click(line, x, y)) {
      out << "expected two integers 'x y'\n";
      continue;
    }
    const SessionEvent event = session.add_point(x, y);
    if (event.kind == EventKind::kPointRejected) {
      out << (event.reason == "degenerate" ? "points are collinear; start this triangle again\n"
                                           : "point outside the image; ignored\n");
    } else if (event.kind == EventKind::kMaskGenerated) {
      out << "saved " << event.mask_path.string() << "\n";
      session.advance();
    }
  }
  out << "finished: " << session.masks_written() << " mask(s) written to "
      << session.output_dir().string() << "\n";
  return kExitOk;
}

fs::path common_root(const fs::path& a, const fs::path& b) {
  const fs::path ca = fs::weakly_canonical(fs::absolute(a));
  const fs::path cb = fs::weakly_canonical(fs::absolute(b));
  fs::path root;
  for (auto ia = ca.begin(), ib = cb.begin(); ia != ca.end() && ib != cb.end() && *ia == *ib;
       ++ia, ++ib) {
    root /= *ia;
  }
  return root.empty() ? ca.root_path() : root;
}

int run_web_session(const fs::path& input, const fs::path& out_dir, const WebOptions& web) {
  ServiceConfig config;
  config.root = common_root(fs::is_directory(input) ? input : input.parent_path(), out_dir);
  config.overlay_alpha = web.alpha;
  if (!web.ui_dir.empty()) config.ui_dir = web.ui_dir;
  AnnotationService service(config);
  const std::string id = service.create_session(fs::absolute(input), fs::absolute(out_dir));
  const int port = service.bind(web.host, web.port);
  if (port < 0) {
    std::cerr << "cannot bind " << web.host << ":" << web.port << "\n";
    return kExitError;
  }
  service.on_finished([&service, &id](const std::string& finished) {
    if (finished == id) service.stop();
  });
  std::cout << "open http://" << web.host << ":" << port << "/?session=" << id << "\n"
            << std::flush;
  service.run();
  return kExitOk;
}

int annotate(const fs::path& input, const fs::path& out_dir, const WebOptions& web) {
  if (web.enabled) return run_web_session(input, out_dir, web);
  Session session = Session::start(input, out_dir, Session::Options{true});
  return run_terminal_session(session, std::cin, std::cout);
}

int interactive_menu(const WebOptions& web) {
  std::cout << "trimask: triangle mask generator\n"
               "  1) single image\n"
               "  2) folder of images\n"
               "Choose an option: "
            << std::flush;
  std::string choice;
  std::getline(std::cin, choice);
  choice = trim(choice);
  if (choice != "1" && choice != "2") {
    std::cerr << "invalid option '" << choice << "': choose 1 or 2\n";
    return kExitBadChoice;
  }
  std::cout << (choice == "1" ? "Enter the full path to the image: "
                              : "Enter the full path to the folder containing images: ")
            << std::flush;
  std::string input;
  std::getline(std::cin, input);
  std::cout << "Enter the full path where the mask(s) should be saved: " << std::flush;
  std::string out_dir;
  std::getline(std::cin, out_dir);
  input = trim(input);
  out_dir = trim(out_dir);
  if (choice == "1" && fs::is_directory(input)) {
    std::cerr << input << " is a folder; use option 2\n";
    return kExitBadChoice;
  }
  if (choice == "2" && !fs::is_directory(input)) {
    std::cerr << input << " is not a folder\n";
    return kExitNoImages;
  }
  return annotate(input, out_dir, web);
}

int apply_command(const fs::path& annotations, const fs::path& images, const fs::path& out_dir) {
  std::ifstream in(annotations);
  if (!in) {
    std::cerr << "cannot open annotations file " << annotations.string() << "\n";
    return kExitError;
  }
  const ApplyResult result = apply_annotations(in, images, out_dir);
  for (const auto& [image, path] : result.written) {
    std::cout << "ok " << image << " -> " << path.string() << "\n";
  }
  for (const auto& f : result.failures) {
    std::cerr << "FAILED line " << f.line << " (" << (f.image.empty() ? "?" : f.image)
              << "): " << to_string(f.code) << ": " << f.message << "\n";
  }
  std::cout << "applied " << result.written.size() << "/" << result.total() << " records\n";
  return result.ok() ? kExitOk : kExitApplyFailed;
}

int eval_command(const fs::path& pred, const fs::path& ref) {
  std::vector<NamedMaskPair> pairs;
  try {
    pairs = load_mask_pairs(pred, ref);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool mismatch =
        e.code() == ErrorCode::kUnpaired || e.code() == ErrorCode::kDimensionMismatch;
    return mismatch ? kExitEvalMismatch : kExitError;
  }
  const MaskReport report = eval_pairs(pairs);
  std::cerr << "# per-image foreground IoU; miou = mean of per-image (fg+bg)/2 IoU; "
               "accuracy = pixel agreement over all pixels\n";
  if (report.empty_warning) std::cerr << "warning: no mask pairs found; aggregates are vacuous\n";
  std::cout << format_report(report);
  return kExitOk;
}

int serve_command(const std::string& root, const std::string& input, const std::string& out,
                  const WebOptions& web) {
  ServiceConfig config;
  config.root = root.empty() ? fs::current_path() : fs::path(root);
  config.overlay_alpha = web.alpha;
  if (!web.ui_dir.empty()) config.ui_dir = web.ui_dir;
  AnnotationService service(config);
  std::optional<std::string> id;
  if (!input.empty()) id = service.create_session(input, out.empty() ? fs::path("masks") : fs::path(out));
  const int port = service.bind(web.host, web.port);
  if (port < 0) {
    std::cerr << "cannot bind " << web.host << ":" << web.port << "\n";
    return kExitError;
  }
  std::cout << "listening on http://" << web.host << ":" << port << "/\n";
  if (id) std::cout << "session " << *id << "\n";
  std::cout << std::flush;
  service.run();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-click triangle mask generator for drivable-region segmentation"};
  app.require_subcommand(0, 1);

  WebOptions web;
  const auto add_web_options = [&web](CLI::App* cmd, bool with_flag) {
    if (with_flag) cmd->add_flag("--web", web.enabled, "Annotate in the browser instead of the terminal");
    cmd->add_option("--host", web.host, "Address to bind")->capture_default_str();
    cmd->add_option("--port", web.port, "Port to bind (0 picks a free port)")->capture_default_str();
    cmd->add_option("--ui", web.ui_dir, "Directory with the built browser UI");
    cmd->add_option("--alpha", web.alpha, "Overlay opacity in [0,1]")->capture_default_str();
  };
  add_web_options(&app, true);

  std::string input;
  std::string out;

  auto* single = app.add_subcommand("single", "Annotate one image");
  single->add_option("image", input, "Image file")->required();
  single->add_option("--out", out, "Mask output directory")->required();
  add_web_options(single, true);

  auto* batch = app.add_subcommand("batch", "Annotate every image in a folder");
  batch->add_option("dir", input, "Image folder")->required();
  batch->add_option("--out", out, "Mask output directory")->required();
  add_web_options(batch, true);

  std::string annotations;
  auto* apply = app.add_subcommand("apply", "Regenerate masks from a JSON Lines annotations file");
  apply->add_option("--annotations", annotations, "annotations.jsonl")->required();
  apply->add_option("--images", input, "Folder the image names are relative to")->required();
  apply->add_option("--out", out, "Mask output directory")->required();

  std::string pred;
  std::string ref;
  auto* eval = app.add_subcommand("eval", "Score predicted masks against reference masks");
  eval->add_option("--pred", pred, "Predicted mask folder")->required();
  eval->add_option("--ref", ref, "Reference mask folder")->required();

  std::string root;
  auto* serve = app.add_subcommand("serve", "Run the annotation HTTP service");
  serve->add_option("--input", input, "Open a session over this folder at startup");
  serve->add_option("--out", out, "Output folder for the startup session");
  serve->add_option("--root", root, "Requests may only reference paths under this folder");
  add_web_options(serve, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*single) return annotate(input, out, web);
    if (*batch) return annotate(input, out, web);
    if (*apply) return apply_command(annotations, input, out);
    if (*eval) return eval_command(pred, ref);
    if (*serve) return serve_command(root, input, out, web);
    return interactive_menu(web);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kNoImagesFound ? kExitNoImages : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
