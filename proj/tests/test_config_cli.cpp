#include <doctest.h>

#include <nlohmann/json.hpp>

#include "cli_helpers.hpp"
#include "simpaste/config.hpp"
#include "simpaste/instance_buffer.hpp"
#include "simpaste/png_io.hpp"

using namespace simpaste;
namespace fs = std::filesystem;

TEST_CASE("config text parsing") {
  RunConfig cfg;
  apply_config_text(
      "# comment\n"
      "master_seed = 18446744073709551615\n"
      "workers=3\n"
      "\n"
      "min_paste_area = 10  # trailing\n"
      "feather_radius = 1.5\n"
      "paste_order = input\n"
      "refine_coverage = false\n"
      "scale_reference = pre_rotation\n"
      "instance_encoding = color\n"
      "conf_thresh = 0.5\n"
      "iou_thresh = 0.45\n"
      "ap_mode = 101_point\n",
      cfg);
  CHECK(cfg.master_seed == 18446744073709551615ull);
  CHECK(cfg.workers == 3);
  CHECK(cfg.compositor.min_paste_area == 10);
  CHECK(cfg.compositor.feather_radius == 1.5);
  CHECK(cfg.compositor.paste_order == PasteOrder::kInput);
  CHECK_FALSE(cfg.compositor.refine_coverage);
  CHECK(cfg.compositor.scale_reference == ScaleReference::kPreRotation);
  CHECK(cfg.instance_encoding == MapEncoding::kColorCoded);
  CHECK(cfg.eval.conf_thresh == 0.5);
  CHECK(cfg.eval.iou_thresh == 0.45);
  CHECK(cfg.eval.ap_mode == eval::ApMode::kPoints101);
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("config errors") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_config_text("colour = red\n", cfg), ConfigError);
  CHECK_THROWS_AS(apply_config_text("workers\n", cfg), ConfigError);
  CHECK_THROWS_AS(apply_config_text("workers = many\n", cfg), ConfigError);
  CHECK_THROWS_AS(apply_config_text("feather_radius = 1.5px\n", cfg), ConfigError);
  CHECK_THROWS_AS(apply_config_text("paste_order = random\n", cfg), ConfigError);
  CHECK_THROWS_AS(apply_config_text("refine_coverage = yes\n", cfg), ConfigError);
  RunConfig bad;
  bad.workers = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = {};
  bad.eval.conf_thresh = 1.5;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = {};
  bad.compositor.feather_radius = -1;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  CHECK_THROWS_AS(apply_config_file("/nonexistent/simpaste.cfg", cfg), IoError);
}

TEST_CASE("cli ingest") {
  test::TempDir dir;
  const auto empty = test::run_cli({"ingest", "--buffer", dir.path().string()});
  CHECK(empty.code == 1);
  CHECK(empty.err.find("EmptyBuffer") != std::string::npos);

  Mask m(12, 12);
  for (int i = 0; i < 100; ++i) m.set(i % 12, i / 12);
  png::write_rgb(dir / "a.rgb.png", RgbImage(12, 12, {1, 2, 3}));
  png::write_mask(dir / "a.mask.png", m);
  png::write_rgb(dir / "b.rgb.png", RgbImage(12, 12));
  const auto mixed = test::run_cli({"ingest", "--buffer", dir.path().string(), "--seed", "9"});
  CHECK(mixed.code == 0);
  CHECK(mixed.out.find("skipped b") != std::string::npos);
  const auto manifest = nlohmann::json::parse(test::read_file(dir / "buffer.json"));
  CHECK(manifest["items"].size() == 1);
  CHECK(manifest["skipped"].size() == 1);
  CHECK(manifest["seed"] == 9);
  CHECK(manifest["manifest_digest"].get<std::string>().size() == 64);
}

TEST_CASE("cli synth") {
  test::TempDir a, b;
  const auto r = test::run_cli({"synth", "--out", a.path().string(), "--n", "4", "--seed", "5"});
  REQUIRE(r.code == 0);
  const auto manifest = nlohmann::json::parse(test::read_file(a / "synth.json"));
  CHECK(manifest["seed"] == 5);
  std::map<std::string, int> levels;
  for (const auto& s : manifest["scenes"]) ++levels[s["lighting_level"].get<std::string>()];
  CHECK(levels == std::map<std::string, int>{{"backlight", 1}, {"high", 1}, {"low", 1}, {"medium", 1}});
  CHECK(fs::exists(a / "scene_00003.inst.png"));

  REQUIRE(test::run_cli({"synth", "--out", b.path().string(), "--n", "4", "--seed", "5", "--workers", "3"}).code ==
          0);
  CHECK(test::snapshot(a.path()) == test::snapshot(b.path()));

  CHECK(test::run_cli({"synth", "--out", a.path().string(), "--min-size", "90", "--max-size", "10"}).code == 1);
  CHECK(test::run_cli({"synth", "--out", a.path().string(), "--levels", "1,2,3"}).code == 1);
}

TEST_CASE("cli compose, resume and eval") {
  test::TempDir root;
  const fs::path scenes = root / "scenes", real = root / "real_scenes", buffer = root / "buffer", out = root / "out",
                 again = root / "again";
  REQUIRE(test::run_cli({"synth", "--out", scenes.string(), "--n", "6", "--seed", "1", "--occluders", "1"}).code == 0);
  REQUIRE(test::run_cli({"synth", "--out", real.string(), "--n", "4", "--seed", "2", "--palette", "natural"}).code ==
          0);
  REQUIRE(test::run_cli({"extract", "--scenes", real.string(), "--out", buffer.string()}).code == 0);

  CHECK(test::run_cli({"compose", "--scenes", scenes.string(), "--buffer", (root / "missing").string(), "--out",
                       out.string()})
            .code == 1);

  const std::vector<std::string> compose = {"compose",      "--scenes", scenes.string(), "--buffer",
                                            buffer.string(), "--seed",   "3"};
  auto with_out = [&](const fs::path& o, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = compose;
    args.push_back("--out");
    args.push_back(o.string());
    args.insert(args.end(), extra.begin(), extra.end());
    return test::run_cli(args);
  };
  REQUIRE(with_out(out).code == 0);
  const auto full = test::snapshot(out);
  std::size_t images = 0, labels = 0, records = 0;
  for (const auto& [name, bytes] : full) {
    images += name.ends_with(".rgb.png");
    labels += name.ends_with(".txt");
    records += name.ends_with(".record.json");
  }
  CHECK(images == 6);
  CHECK(labels == 6);
  CHECK(records == 6);

  // Partial job: run once, delete two scenes' outputs, resume.
  REQUIRE(with_out(again).code == 0);
  fs::remove(again / "scene_00001.rgb.png");
  fs::remove(again / "scene_00004.txt");
  const auto resumed = with_out(again, {"--resume"});
  CHECK(resumed.code == 0);
  CHECK(resumed.out.find("4 reused") != std::string::npos);
  CHECK(test::snapshot(again) == full);

  // Eval: labels as predictions are perfect; no predictions score zero.
  const fs::path preds = root / "preds", none = root / "none", report = root / "report";
  test::labels_as_predictions(out, preds);
  fs::create_directories(none);
  const auto perfect = test::run_cli({"eval", "--gt", out.string(), "--pred", preds.string(), "--out",
                                      report.string(), "--images", out.string()});
  REQUIRE(perfect.code == 0);
  auto j = nlohmann::json::parse(test::read_file(report / "report.json"));
  for (const char* k : {"precision", "recall", "f1", "map50", "map50_95"}) CHECK(j[k].get<double>() == 1.0);
  CHECK(perfect.out.find("mAP50-95") != std::string::npos);

  REQUIRE(test::run_cli({"eval", "--gt", out.string(), "--pred", none.string(), "--out", report.string()}).code == 0);
  j = nlohmann::json::parse(test::read_file(report / "report.json"));
  for (const char* k : {"precision", "recall", "f1", "map50", "map50_95"}) CHECK(j[k].get<double>() == 0.0);
  CHECK(j["conf_thresh"] == 0.25);
  CHECK(j["iou_thresh"] == 0.3);
}

TEST_CASE("cli rejects unknown subcommands and flags") {
  CHECK(test::run_cli({}).code == 1);
  CHECK(test::run_cli({"train"}).code == 1);
  CHECK(test::run_cli({"eval", "--gt", "x"}).code == 1);
}
