// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   trimask_acceptance [--only <substring>]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../test_support.hpp"
#include "trimask/service.hpp"
#include "trimask/trimask.hpp"

#ifndef TRIMASK_CLI
#error "TRIMASK_CLI must name the trimask executable"
#endif

namespace fs = std::filesystem;
using namespace trimask;
using testing::TempDir;

namespace {

struct CriterionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw CriterionFailed(what);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

testing::CommandResult run_cli(const std::string& args) {
  return testing::run_command(std::string(TRIMASK_CLI) + " " + args);
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::string record(const std::string& image, const std::array<ClickPoint, 3>& c) {
  return format_annotation({image, c}) + "\n";
}

std::array<ClickPoint, 3> random_clicks(std::mt19937_64& rng, std::int64_t w, std::int64_t h) {
  std::array<ClickPoint, 3> c{};
  for (;;) {
    for (auto& p : c) {
      p = {std::uniform_int_distribution<std::int64_t>(0, w - 1)(rng),
           std::uniform_int_distribution<std::int64_t>(0, h - 1)(rng)};
    }
    if (!is_degenerate({click_to_vertex(c[0].x, c[0].y), click_to_vertex(c[1].x, c[1].y),
                        click_to_vertex(c[2].x, c[2].y)})) {
      return c;
    }
  }
}

std::vector<std::pair<std::string, std::uint64_t>> hash_masks(const fs::path& dir) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (const auto& p : list_images(dir)) {
    out.emplace_back(p.filename().string(), testing::fnv1a(read_file(p)));
  }
  return out;
}

// --- criteria ---------------------------------------------------------------

std::string oracle_equivalence() {
  std::mt19937_64 rng(20240601);
  const auto start = Clock::now();
  constexpr int kTrials = 1000;
  int mismatched_pixels = 0;
  for (int n = 0; n < kTrials; ++n) {
    const auto rt = testing::random_triangle(rng, 128);
    const RasterConfig cfg{rt.width, rt.height};
    const BinaryMask fast = rasterize_scanline(rt.tri, cfg);
    const BinaryMask slow = rasterize_oracle(rt.tri, cfg);
    for (std::size_t i = 0; i < fast.size(); ++i) mismatched_pixels += fast.cells()[i] != slow.cells()[i];
  }
  const double elapsed = seconds_since(start);
  require(mismatched_pixels == 0, std::to_string(mismatched_pixels) + " mismatched pixels");
  require(elapsed < 30.0, fmt("took %.2f s (limit 30 s)", elapsed));
  return std::to_string(kTrials) + " triangles, 0 mismatches, " + fmt("%.2f s", elapsed);
}

std::string vertex_order_invariance() {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 200; ++n) {
    const auto rt = testing::random_triangle(rng, 128);
    const RasterConfig cfg{rt.width, rt.height};
    const std::array<Point2, 3> v{rt.tri.p1, rt.tri.p2, rt.tri.p3};
    const Bytes reference = encode_png(rasterize_scanline(rt.tri, cfg));
    std::array<int, 3> idx{0, 1, 2};
    do {
      const Bytes permuted = encode_png(rasterize_scanline({v[idx[0]], v[idx[1]], v[idx[2]]}, cfg));
      require(permuted == reference, "permutation differs at triangle " + std::to_string(n));
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  return "200 triangles x 6 permutations byte-identical";
}

std::string area_consistency() {
  std::mt19937_64 rng(11);
  double worst = 0;
  for (int n = 0; n < 500; ++n) {
    const auto rt = testing::random_triangle(rng, 128);
    const double count = double(rasterize_scanline(rt.tri, {rt.width, rt.height}).foreground_count());
    const double excess = std::abs(count - std::abs(signed_area(rt.tri))) - (perimeter(rt.tri) + 3);
    worst = std::max(worst, excess + perimeter(rt.tri) + 3);
    require(excess <= 0, "triangle " + std::to_string(n) + " exceeds perimeter + 3");
  }
  return "500 triangles within bound (largest |count - area| " + fmt("%.1f px)", worst);
}

std::string clicked_pixel_coverage() {
  std::mt19937_64 rng(13);
  for (int n = 0; n < 200; ++n) {
    // Three non-collinear pixels need at least a 2x2 image.
    const std::int64_t w = std::uniform_int_distribution<std::int64_t>(2, 128)(rng);
    const std::int64_t h = std::uniform_int_distribution<std::int64_t>(2, 128)(rng);
    const auto clicks = random_clicks(rng, w, h);
    const BinaryMask mask = mask_from_clicks(clicks, {w, h});
    for (const auto& c : clicks) {
      require(mask.at(c.x, c.y) == 1, "clicked pixel background in triple " + std::to_string(n));
    }
  }
  return "200 click triples, all clicked pixels foreground";
}

std::string png_round_trip() {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 100; ++n) {
    const std::int64_t w = std::uniform_int_distribution<std::int64_t>(1, 128)(rng);
    const std::int64_t h = std::uniform_int_distribution<std::int64_t>(1, 128)(rng);
    const BinaryMask m = testing::random_mask(rng, w, h, std::uniform_real_distribution<>(0, 1)(rng));
    const Bytes a = encode_png(m);
    require(a == encode_png(m), "two encodes differ for mask " + std::to_string(n));
    require(decode_png(a) == m, "round trip differs for mask " + std::to_string(n));
  }
  return "100 masks round-trip, encodes byte-identical";
}

std::string headless_determinism() {
  TempDir dir("trimask-accept");
  const fs::path images = dir / "images";
  fs::create_directories(images);
  std::mt19937_64 rng(19);
  std::string good;
  for (int i = 0; i < 10; ++i) {
    const std::int64_t w = 40 + 7 * i;
    const std::int64_t h = 30 + 5 * i;
    const std::string name = "frame" + std::to_string(i) + (i % 3 == 0 ? ".jpg" : ".png");
    if (i % 3 == 0) {
      testing::write_jpeg_image(images / name, w, h, unsigned(i));
    } else {
      testing::write_png_image(images / name, w, h, unsigned(i));
    }
    good += record(name, random_clicks(rng, w, h));
  }
  const fs::path annotations = dir / "annotations.jsonl";
  write_file(annotations, Bytes(good.begin(), good.end()));

  std::vector<std::pair<std::string, std::uint64_t>> runs[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path out = dir / ("out" + std::to_string(run));
    const auto r = run_cli("apply --annotations " + quote(annotations) + " --images " +
                           quote(images) + " --out " + quote(out));
    require(r.exit_code == 0, "apply exited " + std::to_string(r.exit_code) + ": " + r.err);
    runs[run] = hash_masks(out);
  }
  require(runs[0].size() == 10, "expected 10 masks, got " + std::to_string(runs[0].size()));
  require(runs[0] == runs[1], "mask hashes differ between runs");

  const std::string bad = good + record("frame1.png", {{{1, 1}, {2, 2}, {3, 3}}}) +
                          record("frame2.png", {{{0, 0}, {500, 0}, {0, 5}}});
  const fs::path bad_file = dir / "bad.jsonl";
  write_file(bad_file, Bytes(bad.begin(), bad.end()));
  const auto r = run_cli("apply --annotations " + quote(bad_file) + " --images " + quote(images) +
                         " --out " + quote(dir / "bad_out"));
  require(r.exit_code == 4, "bad records exited " + std::to_string(r.exit_code));
  require(r.err.find("FAILED line 11 (frame1.png): degenerate: ") != std::string::npos,
          "missing degenerate stderr line: " + r.err);
  require(r.err.find("FAILED line 12 (frame2.png): out_of_bounds: ") != std::string::npos,
          "missing out_of_bounds stderr line: " + r.err);
  require(hash_masks(dir / "bad_out") == runs[0], "valid records changed by bad ones");
  return "10-image corpus hash-identical across runs; bad records exit 4 with FAILED lines";
}

std::string metrics_oracle() {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 100; ++n) {
    const double density = std::uniform_real_distribution<>(0, 1)(rng);
    const BinaryMask a = testing::random_mask(rng, 16, 16, density);
    const BinaryMask b = testing::random_mask(rng, 16, 16, 1 - density);
    const auto expected = testing::count_oracle(a, b);
    require(iou(a, b) == expected.iou, "iou differs at pair " + std::to_string(n));
    require(pixel_accuracy(a, b) == expected.accuracy, "accuracy differs at pair " + std::to_string(n));
    require(miou(a, b) == expected.miou, "miou differs at pair " + std::to_string(n));
  }
  const BinaryMask pred(4, 1, {1, 1, 0, 0});
  const BinaryMask ref(4, 1, {1, 0, 0, 0});
  require(pixel_accuracy(pred, ref) == 0.75, "worked example accuracy");
  require(std::abs(miou(pred, ref) - 7.0 / 12.0) < 1e-12, "worked example miou");
  return "100 pairs exact; worked example accuracy 0.75, miou " + fmt("%.6f", miou(pred, ref));
}

std::string session_state_machine() {
  TempDir dir("trimask-accept");
  const fs::path images = dir / "images";
  fs::create_directories(images);
  for (const char* name : {"a.png", "b.png", "c.png"}) testing::write_png_image(images / name, 32, 24);
  const fs::path out = dir / "out";

  Session s = Session::start(images, out);
  struct Step {
    std::function<SessionEvent()> op;
    EventKind kind;
    SessionState state;
    std::size_t pending;
    std::size_t cursor;
  };
  using K = EventKind;
  using S = SessionState;
  const std::vector<Step> script = {
      {[&] { return s.add_point(1, 1); }, K::kPointAccepted, S::kAwaitingPoints, 1, 0},
      {[&] { return s.add_point(20, 2); }, K::kPointAccepted, S::kAwaitingPoints, 2, 0},
      {[&] { return s.undo_point(); }, K::kPointUndone, S::kAwaitingPoints, 1, 0},
      {[&] { return s.add_point(30, 1); }, K::kPointAccepted, S::kAwaitingPoints, 2, 0},
      {[&] { return s.add_point(32, 5); }, K::kPointRejected, S::kAwaitingPoints, 2, 0},
      {[&] { return s.add_point(10, 20); }, K::kMaskGenerated, S::kMaskReady, 0, 0},
      {[&] { return s.advance(); }, K::kAdvanced, S::kAwaitingPoints, 0, 1},
      {[&] { return s.add_point(1, 1); }, K::kPointAccepted, S::kAwaitingPoints, 1, 1},
      {[&] { return s.add_point(2, 2); }, K::kPointAccepted, S::kAwaitingPoints, 2, 1},
      {[&] { return s.add_point(3, 3); }, K::kPointRejected, S::kAwaitingPoints, 0, 1},
      {[&] { return s.add_point(0, 0); }, K::kPointAccepted, S::kAwaitingPoints, 1, 1},
      {[&] { return s.add_point(31, 0); }, K::kPointAccepted, S::kAwaitingPoints, 2, 1},
      {[&] { return s.add_point(0, 23); }, K::kMaskGenerated, S::kMaskReady, 0, 1},
      {[&] { return s.advance(); }, K::kAdvanced, S::kAwaitingPoints, 0, 2},
      {[&] { return s.add_point(4, 4); }, K::kPointAccepted, S::kAwaitingPoints, 1, 2},
      {[&] { return s.terminate(); }, K::kFinished, S::kFinished, 0, 2},
  };
  for (std::size_t i = 0; i < script.size(); ++i) {
    const SessionEvent e = script[i].op();
    const std::string at = "step " + std::to_string(i + 1);
    require(e.kind == script[i].kind, at + ": event " + std::string(to_string(e.kind)));
    require(s.state() == script[i].state, at + ": state " + std::string(to_string(s.state())));
    require(s.pending().size() == script[i].pending, at + ": pending count");
    require(s.cursor() == script[i].cursor, at + ": cursor");
  }

  const auto wrong_state = [](const std::function<void()>& fn, ErrorCode expected) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code() == expected;
    }
    return false;
  };
  require(wrong_state([&] { s.add_point(1, 1); }, ErrorCode::kWrongState), "add_point after finish");
  require(wrong_state([&] { s.advance(); }, ErrorCode::kWrongState), "advance after finish");
  require(wrong_state([&] { s.undo_point(); }, ErrorCode::kWrongState), "undo after finish");

  Session fresh = Session::start(images / "a.png", dir / "single");
  require(wrong_state([&] { fresh.advance(); }, ErrorCode::kWrongState), "advance while awaiting");
  require(wrong_state([&] { fresh.undo_point(); }, ErrorCode::kNothingToUndo), "undo with no points");

  // The undo replaced (20,2) with (30,1).
  const BinaryMask a = decode_png(read_file(out / "a_mask.png"));
  require(a == mask_from_clicks({ClickPoint{1, 1}, {30, 1}, {10, 20}}, {32, 24}),
          "first mask not built from the post-undo points");
  const auto written = list_images(out);
  require(written.size() == 2 && written[0].filename() == "a_mask.png" &&
              written[1].filename() == "b_mask.png",
          "expected exactly a_mask.png and b_mask.png");
  require(s.masks_written() == 2, "masks_written != 2");
  return std::to_string(script.size()) + "-step script matches; one mask per completed image";
}

std::string throughput() {
  TempDir dir("trimask-accept");
  const fs::path images = dir / "images";
  fs::create_directories(images);
  const Bytes frame = encode_rgb_png(testing::make_pattern(640, 480));
  std::mt19937_64 rng(29);
  std::string lines;
  constexpr int kImages = 1030;
  for (int i = 0; i < kImages; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame%04d.png", i);
    write_file(images / name, frame);
    lines += record(name, random_clicks(rng, 640, 480));
  }
  const fs::path annotations = dir / "annotations.jsonl";
  write_file(annotations, Bytes(lines.begin(), lines.end()));

  const fs::path out = dir / "out";
  const auto start = Clock::now();
  const auto r = run_cli("apply --annotations " + quote(annotations) + " --images " + quote(images) +
                         " --out " + quote(out));
  const double elapsed = seconds_since(start);
  require(r.exit_code == 0, "apply exited " + std::to_string(r.exit_code) + ": " + r.err);
  require(list_images(out).size() == kImages, "wrong number of masks written");
  const BinaryMask sample = decode_png(read_file(out / "frame0000_mask.png"));
  require(sample.width() == 640 && sample.height() == 480, "mask size is not 640x480");
  require(elapsed < 10.0, fmt("took %.2f s (limit 10 s)", elapsed));
  return "1030 masks at 640x480 in " + fmt("%.2f s", elapsed);
}

std::string http_contract() {
  TempDir dir("trimask-accept");
  const fs::path images = dir / "in";
  fs::create_directories(images);
  const std::vector<std::pair<std::string, ImageSize>> corpus = {
      {"p.png", {64, 48}}, {"q.jpg", {80, 60}}, {"r.png", {33, 71}}};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& [name, size] = corpus[i];
    if (name.ends_with(".jpg")) {
      testing::write_jpeg_image(images / name, size.width, size.height, unsigned(i));
    } else {
      testing::write_png_image(images / name, size.width, size.height, unsigned(i));
    }
  }
  fs::create_directories(dir / "empty");

  AnnotationService service(ServiceConfig{dir.path(), Rgb{255, 0, 0}, 0.4, std::nullopt});
  const int port = service.bind("127.0.0.1", 0);
  require(port > 0, "could not bind");
  std::thread server([&] { service.run(); });
  struct Stop {
    AnnotationService& s;
    std::thread& t;
    ~Stop() {
      s.stop();
      t.join();
    }
  } stop{service, server};
  service.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  std::vector<int> statuses;
  const auto post = [&](const std::string& path, const std::string& body) {
    auto res = client.Post(path, body, "application/json");
    require(static_cast<bool>(res), "no response from " + path);
    statuses.push_back(res->status);
    return std::make_pair(res->status, res->body);
  };
  const auto json_of = [](const std::string& s) { return nlohmann::json::parse(s); };

  require(post("/api/sessions", "{\"input_dir\":").first == 400, "malformed body not 400");
  require(post("/api/sessions", R"({"input_dir":"../../etc","output_dir":"out"})").first == 403,
          "path escape not 403");
  require(post("/api/sessions", R"({"input_dir":"empty","output_dir":"out"})").first == 404,
          "empty folder not 404");
  require(client.Get("/api/sessions/deadbeef")->status == 404, "unknown session not 404");
  statuses.push_back(404);

  const auto [created, body] = post("/api/sessions", R"({"input_dir":"in","output_dir":"out"})");
  require(created == 201, "create returned " + std::to_string(created));
  const std::string id = json_of(body)["session_id"];
  const std::string base = "/api/sessions/" + id;

  require(post(base + "/undo", "").first == 409, "undo with no points not 409");
  require(post(base + "/advance", "").first == 409, "advance while awaiting not 409");
  require(post(base + "/points", R"({"x":64,"y":0})").first == 422, "out-of-bounds not 422");
  post(base + "/points", R"({"x":1,"y":1})");
  post(base + "/points", R"({"x":2,"y":2})");
  const auto degenerate = post(base + "/points", R"({"x":3,"y":3})");
  require(degenerate.first == 422 && json_of(degenerate.second)["error"] == "degenerate",
          "degenerate triple not 422 degenerate");

  std::mt19937_64 rng(31);
  std::string expected_records;
  for (const auto& [name, size] : corpus) {
    const auto clicks = random_clicks(rng, size.width, size.height);
    expected_records += record(name, clicks);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto [status, reply] = post(base + "/points", nlohmann::json{{"x", clicks[k].x}, {"y", clicks[k].y}}.dump());
      require(status == 200, "click rejected with " + std::to_string(status));
      if (k == 2) require(json_of(reply)["event"] == "MaskGenerated", "third click did not generate");
    }
    require(client.Get(base + "/preview")->status == 200, "preview unavailable");
    require(post(base + "/advance", "").first == 200, "advance failed");
  }
  require(json_of(client.Get(base)->body)["state"] == "Finished", "session not finished");

  const fs::path replay_file = dir / "replay.jsonl";
  write_file(replay_file, Bytes(expected_records.begin(), expected_records.end()));
  const auto r = run_cli("apply --annotations " + quote(replay_file) + " --images " + quote(images) +
                         " --out " + quote(dir / "cli_out"));
  require(r.exit_code == 0, "apply exited " + std::to_string(r.exit_code));
  const auto http_masks = hash_masks(dir / "out");
  require(http_masks.size() == corpus.size(), "wrong number of HTTP masks");
  require(http_masks == hash_masks(dir / "cli_out"), "HTTP masks differ from apply masks");

  for (int code : {400, 403, 404, 409, 422}) {
    require(std::count(statuses.begin(), statuses.end(), code) > 0,
            "status " + std::to_string(code) + " never exercised");
  }
  return "3 replayed masks byte-identical to apply; 400/403/404/409/422 exercised";
}

struct Criterion {
  const char* name;
  std::function<std::string()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  if (argc == 3 && std::string(argv[1]) == "--only") only = argv[2];

  const std::vector<Criterion> criteria = {
      {"rasterizer-oracle-equivalence", oracle_equivalence},
      {"vertex-order-invariance", vertex_order_invariance},
      {"area-consistency", area_consistency},
      {"clicked-pixel-coverage", clicked_pixel_coverage},
      {"png-round-trip", png_round_trip},
      {"headless-determinism", headless_determinism},
      {"metrics-oracle", metrics_oracle},
      {"session-state-machine", session_state_machine},
      {"throughput-1030-masks", throughput},
      {"http-contract", http_contract},
  };

  int failed = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::string(c.name).find(only) == std::string::npos) continue;
    ++ran;
    std::string detail;
    bool ok = false;
    try {
      detail = c.run();
      ok = true;
    } catch (const std::exception& e) {
      detail = e.what();
    }
    failed += ok ? 0 : 1;
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << ": " << detail << "\n" << std::flush;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed\n";
  return failed == 0 && ran > 0 ? 0 : 1;
}
