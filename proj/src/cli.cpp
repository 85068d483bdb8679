#include "simpaste/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "simpaste/compositor.hpp"
#include "simpaste/config.hpp"
#include "simpaste/eval.hpp"
#include "simpaste/instance_buffer.hpp"
#include "simpaste/labels.hpp"
#include "simpaste/png_io.hpp"
#include "simpaste/scene_synth.hpp"

namespace simpaste::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

void require_dir(const fs::path& dir, const std::string& what) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError(what + " directory not found: " + dir.string());
}

/// Runs fn(i) for i in [0, n) on `workers` threads. Returns per-index error
/// messages (empty when the index succeeded).
std::vector<std::string> parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads <= 1) {
    worker();
    return errors;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return errors;
}

/// Scene ids in `dir` that have a `<id>.rgb.png`, sorted.
std::vector<std::string> list_scene_ids(const fs::path& dir) {
  std::vector<std::string> ids;
  const std::string suffix = ".rgb.png";
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      ids.push_back(name.substr(0, name.size() - suffix.size()));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<SceneInstance> load_instances(const fs::path& dir, const std::string& id, MapEncoding encoding) {
  if (encoding == MapEncoding::kIdIndexed) return parse_instance_map(png::read_id_map(dir / (id + ".inst.png")));
  return parse_instance_map(png::read_rgb(dir / (id + ".inst_color.png")));
}

std::string scene_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%05zu", i);
  return buf;
}

// Common --config/--seed/--workers handling. Flags given on the command line
// override config file values.
struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  int workers = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;

  void add(CLI::App* app, bool with_workers) {
    app->add_option("--config", config_path, "key = value config file");
    seed_opt = app->add_option("--seed", seed, "master seed");
    if (with_workers) workers_opt = app->add_option("--workers", workers, "worker threads");
  }

  RunConfig load() const {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_file(config_path, cfg);
    if (seed_opt && seed_opt->count()) cfg.master_seed = seed;
    if (workers_opt && workers_opt->count()) cfg.workers = workers;
    return cfg;
  }
};

// ---------------------------------------------------------------- ingest --

struct IngestCommand {
  CommonFlags common;
  std::string buffer_dir;
  std::string out_path;
  int min_cutout_area = kDefaultMinCutoutArea;
  CLI::Option* area_opt = nullptr;

  void add(CLI::App* app) {
    common.add(app, false);
    app->add_option("--buffer", buffer_dir, "directory of <id>.rgb.png + <id>.mask.png pairs")->required();
    app->add_option("--out", out_path, "manifest path (default <buffer>/buffer.json)");
    area_opt = app->add_option("--min-cutout-area", min_cutout_area, "minimum mask area in pixels");
  }

  int run(std::ostream& out, std::ostream&) {
    RunConfig cfg = common.load();
    if (area_opt->count()) cfg.min_cutout_area = min_cutout_area;
    validate(cfg);
    const IngestResult result = ingest_buffer(buffer_dir, cfg.min_cutout_area);
    const fs::path manifest = out_path.empty() ? fs::path(buffer_dir) / "buffer.json" : fs::path(out_path);
    write_text(manifest, buffer_manifest_json(result, cfg.master_seed, cfg.min_cutout_area));
    out << "ingested " << result.buffer.size() << " cutouts, skipped " << result.skipped.size() << "\n";
    for (const auto& s : result.skipped) out << "  skipped " << s.id << ": " << s.reason << "\n";
    out << "manifest_digest " << result.buffer.manifest_digest() << "\n";
    return kSuccess;
  }
};

// ----------------------------------------------------------------- synth --

struct SynthCommand {
  CommonFlags common;
  std::string out_dir;
  int n = 40;
  std::vector<int> levels;
  SynthSceneSpec base;
  std::string palette = "simulator";
  bool color_maps = false;

  void add(CLI::App* app) {
    common.add(app, true);
    app->add_option("--out", out_dir, "output directory")->required();
    app->add_option("--n", n, "number of scenes")->check(CLI::NonNegativeNumber);
    app->add_option("--levels", levels, "explicit scene counts for low,medium,high,backlight")
        ->delimiter(',')
        ->expected(4);
    app->add_option("--width", base.width, "scene width");
    app->add_option("--height", base.height, "scene height");
    app->add_option("--instances", base.n_instances, "bunches per scene");
    app->add_option("--min-size", base.size_min, "minimum bunch length (px)");
    app->add_option("--max-size", base.size_max, "maximum bunch length (px)");
    app->add_option("--occluders", base.n_occluders, "occluding leaves per scene");
    app->add_option("--palette", palette, "simulator | natural")->check(CLI::IsMember({"simulator", "natural"}));
    app->add_flag("--color-maps", color_maps, "also write color-coded <id>.inst_color.png");
  }

  int run(std::ostream& out, std::ostream& err) {
    const RunConfig cfg = common.load();
    validate(cfg);
    std::array<int, 4> counts{};
    if (!levels.empty()) {
      std::copy(levels.begin(), levels.end(), counts.begin());
      if (std::any_of(counts.begin(), counts.end(), [](int c) { return c < 0; }))
        throw SpecError("level counts must be >= 0");
      n = counts[0] + counts[1] + counts[2] + counts[3];
    } else {
      counts = apportion_levels(n);
    }
    base.palette = palette == "natural" ? TexturePalette::kNatural : TexturePalette::kSimulator;
    base.validate();
    ensure_dir(out_dir);

    std::vector<LightingLevel> level_of;
    for (std::size_t l = 0; l < 4; ++l) level_of.insert(level_of.end(), static_cast<std::size_t>(counts[l]), kLightingLevels[l]);

    const fs::path dir(out_dir);
    const auto errors = parallel_for(level_of.size(), cfg.workers, [&](std::size_t i) {
      SynthSceneSpec spec = base;
      spec.lighting = level_of[i];
      spec.seed = cfg.master_seed ^ static_cast<std::uint64_t>(i);
      const std::string id = scene_name(i);
      const SynthScene scene = synth_scene(spec);
      png::write_rgb(dir / (id + ".rgb.png"), scene.image);
      png::write_id_map(dir / (id + ".inst.png"), scene.instance_map);
      if (color_maps) png::write_rgb(dir / (id + ".inst_color.png"), color_coded_map(scene.instance_map));
      write_text(dir / (id + ".scene.json"), scene_spec_json(spec, id, cfg.master_seed));
    });

    nlohmann::ordered_json manifest;
    manifest["seed"] = cfg.master_seed;
    manifest["n"] = level_of.size();
    manifest["level_counts"] = {{"low", counts[0]}, {"medium", counts[1]}, {"high", counts[2]}, {"backlight", counts[3]}};
    manifest["scenes"] = nlohmann::ordered_json::array();
    std::size_t failed = 0;
    for (std::size_t i = 0; i < level_of.size(); ++i) {
      if (!errors[i].empty()) {
        ++failed;
        err << "scene " << scene_name(i) << " failed: " << errors[i] << "\n";
        continue;
      }
      manifest["scenes"].push_back({{"scene_id", scene_name(i)}, {"lighting_level", to_string(level_of[i])}});
    }
    write_text(dir / "synth.json", manifest.dump(2) + "\n");
    out << "synthesized " << level_of.size() - failed << " scenes (low " << counts[0] << ", medium " << counts[1]
        << ", high " << counts[2] << ", backlight " << counts[3] << ")\n";
    if (failed == level_of.size() && failed > 0) return kFailure;
    return failed ? kPartial : kSuccess;
  }
};

// --------------------------------------------------------------- extract --

struct ExtractCommand {
  CommonFlags common;
  std::string scenes_dir;
  std::string out_dir;
  int min_area = kDefaultMinCutoutArea;
  std::string encoding;

  void add(CLI::App* app) {
    common.add(app, false);
    app->add_option("--scenes", scenes_dir, "scene directory")->required();
    app->add_option("--out", out_dir, "cutout directory")->required();
    app->add_option("--min-area", min_area, "skip instances smaller than this");
    app->add_option("--encoding", encoding, "instance map encoding: id | color");
  }

  int run(std::ostream& out, std::ostream&) {
    RunConfig cfg = common.load();
    if (!encoding.empty()) cfg.instance_encoding = parse_map_encoding(encoding);
    require_dir(scenes_dir, "scenes");
    ensure_dir(out_dir);
    std::size_t written = 0;
    for (const auto& id : list_scene_ids(scenes_dir)) {
      const RgbImage image = png::read_rgb(fs::path(scenes_dir) / (id + ".rgb.png"));
      for (const auto& inst : load_instances(scenes_dir, id, cfg.instance_encoding)) {
        if (inst.area() < static_cast<std::size_t>(min_area)) continue;
        const BBox& b = inst.bbox();
        RgbImage color(b.width, b.height);
        Mask mask(b.width, b.height);
        for (int y = 0; y < b.height; ++y) {
          for (int x = 0; x < b.width; ++x) {
            color.set(x, y, image.at(b.x_min + x, b.y_min + y));
            if (inst.mask().at(b.x_min + x, b.y_min + y)) mask.set(x, y);
          }
        }
        const std::string cid = id + "_i" + std::to_string(inst.instance_id());
        png::write_rgb(fs::path(out_dir) / (cid + ".rgb.png"), color);
        png::write_mask(fs::path(out_dir) / (cid + ".mask.png"), mask);
        ++written;
      }
    }
    out << "extracted " << written << " cutouts\n";
    return written ? kSuccess : kFailure;
  }
};

// --------------------------------------------------------------- compose --

struct ComposeCommand {
  CommonFlags common;
  std::string scenes_dir;
  std::string buffer_dir;
  std::string out_dir;
  int min_paste_area = 64;
  double feather = 0.0;
  int min_cutout_area = kDefaultMinCutoutArea;
  std::string encoding, paste_order, scale_reference;
  bool resume = false;
  CLI::Option* paste_area_opt = nullptr;
  CLI::Option* feather_opt = nullptr;
  CLI::Option* cutout_area_opt = nullptr;

  void add(CLI::App* app) {
    common.add(app, true);
    app->add_option("--scenes", scenes_dir, "scene directory (synth output)")->required();
    app->add_option("--buffer", buffer_dir, "cutout buffer directory")->required();
    app->add_option("--out", out_dir, "output directory")->required();
    paste_area_opt = app->add_option("--min-paste-area", min_paste_area, "skip smaller synthetic instances");
    feather_opt = app->add_option("--feather", feather, "feather radius in pixels");
    cutout_area_opt = app->add_option("--min-cutout-area", min_cutout_area, "minimum cutout mask area");
    app->add_option("--encoding", encoding, "instance map encoding: id | color");
    app->add_option("--paste-order", paste_order, "area_desc | input");
    app->add_option("--scale-reference", scale_reference, "post_rotation | pre_rotation");
    app->add_flag("--resume", resume, "only compose scenes whose outputs are missing");
  }

  int run(std::ostream& out, std::ostream& err) {
    RunConfig cfg = common.load();
    if (paste_area_opt->count()) cfg.compositor.min_paste_area = min_paste_area;
    if (feather_opt->count()) cfg.compositor.feather_radius = feather;
    if (cutout_area_opt->count()) cfg.min_cutout_area = min_cutout_area;
    if (!encoding.empty()) cfg.instance_encoding = parse_map_encoding(encoding);
    if (!paste_order.empty()) cfg.compositor.paste_order = parse_paste_order(paste_order);
    if (!scale_reference.empty()) cfg.compositor.scale_reference = parse_scale_reference(scale_reference);
    validate(cfg);

    require_dir(scenes_dir, "scenes");
    const IngestResult ingested = ingest_buffer(buffer_dir, cfg.min_cutout_area);
    const CutoutBuffer& buffer = ingested.buffer;
    ensure_dir(out_dir);
    const fs::path in(scenes_dir);
    const fs::path dir(out_dir);
    const std::vector<std::string> ids = list_scene_ids(in);

    auto outputs = [&](const std::string& id) {
      return std::array<fs::path, 4>{dir / (id + ".rgb.png"), dir / (id + ".txt"), dir / (id + ".labels.json"),
                                     dir / (id + ".record.json")};
    };

    std::atomic<std::size_t> reused{0};
    const auto errors = parallel_for(ids.size(), cfg.workers, [&](std::size_t i) {
      const std::string& id = ids[i];
      const auto paths = outputs(id);
      if (resume && std::all_of(paths.begin(), paths.end(), [](const fs::path& p) { return fs::exists(p); })) {
        ++reused;
        return;
      }
      const RgbImage image = png::read_rgb(in / (id + ".rgb.png"));
      const std::vector<SceneInstance> instances = load_instances(in, id, cfg.instance_encoding);
      Rng rng = Rng::for_scene(cfg.master_seed, i);
      const CompositeResult result = compose_scene(image, instances, buffer, rng, cfg.compositor, id);

      std::map<int, std::string> provenance;
      std::vector<SceneInstance> pasted;
      for (const auto& e : result.record.entries) {
        if (e.skipped) continue;
        provenance[e.instance_id] = e.cutout_id;
      }
      for (const auto& inst : instances)
        if (provenance.contains(inst.instance_id())) pasted.push_back(inst);

      png::write_rgb(paths[0], result.image);
      write_text(paths[1], emit_labels(pasted, image.width(), image.height(), LabelFormat::kNormalizedText));
      write_text(paths[2],
                 emit_labels(pasted, image.width(), image.height(), LabelFormat::kJsonManifest, provenance));
      write_text(paths[3], composite_record_json(result.record, cfg.master_seed));
    });

    nlohmann::ordered_json dataset;
    dataset["seed"] = cfg.master_seed;
    dataset["buffer_digest"] = buffer.manifest_digest();
    dataset["items"] = nlohmann::ordered_json::array();
    std::size_t failed = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!errors[i].empty()) {
        ++failed;
        err << "scene " << ids[i] << " skipped: " << errors[i] << "\n";
        continue;
      }
      dataset["items"].push_back({{"scene_id", ids[i]},
                                  {"image", ids[i] + ".rgb.png"},
                                  {"labels", ids[i] + ".txt"},
                                  {"record", ids[i] + ".record.json"}});
    }
    write_text(dir / "dataset.json", dataset.dump(2) + "\n");
    out << "composed " << ids.size() - failed << " of " << ids.size() << " scenes";
    if (reused) out << " (" << reused << " reused)";
    out << "\n";
    if (ids.empty() || failed == ids.size()) return ids.empty() ? kSuccess : kFailure;
    return failed ? kPartial : kSuccess;
  }
};

// ------------------------------------------------------------------ eval --

struct EvalCommand {
  CommonFlags common;
  std::string gt_dir, pred_dir, out_dir, images_dir, name = "run", ap_mode;
  double conf = eval::kDefaultConfThresh;
  double iou = eval::kDefaultIouThresh;
  CLI::Option* conf_opt = nullptr;
  CLI::Option* iou_opt = nullptr;

  void add(CLI::App* app) {
    common.add(app, false);
    app->add_option("--gt", gt_dir, "ground-truth label directory (<id>.txt)")->required();
    app->add_option("--pred", pred_dir, "prediction directory (<id>.txt)")->required();
    app->add_option("--out", out_dir, "report directory")->required();
    app->add_option("--images", images_dir, "directory of <id>.rgb.png to denormalize boxes");
    app->add_option("--name", name, "row name in the report table");
    conf_opt = app->add_option("--conf-thresh", conf, "confidence threshold (default 0.25)");
    iou_opt = app->add_option("--iou-thresh", iou, "IoU threshold for P/R/F1 (default 0.3)");
    app->add_option("--ap-mode", ap_mode, "all_points | 101_point");
  }

  int run(std::ostream& out, std::ostream&) {
    RunConfig cfg = common.load();
    if (conf_opt->count()) cfg.eval.conf_thresh = conf;
    if (iou_opt->count()) cfg.eval.iou_thresh = iou;
    if (!ap_mode.empty()) cfg.eval.ap_mode = parse_ap_mode(ap_mode);
    validate(cfg);
    require_dir(gt_dir, "ground-truth");
    require_dir(pred_dir, "prediction");

    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(gt_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".txt") ids.push_back(entry.path().stem().string());
    std::sort(ids.begin(), ids.end());

    std::vector<eval::ImageSample> samples;
    for (const auto& id : ids) {
      double w = 1.0, h = 1.0;
      if (!images_dir.empty()) {
        const png::Raster r = png::read(fs::path(images_dir) / (id + ".rgb.png"));
        w = r.width;
        h = r.height;
      }
      eval::ImageSample s;
      for (const auto& l : parse_label_text(read_text(fs::path(gt_dir) / (id + ".txt"))))
        s.gts.push_back({(l.cx - 0.5 * l.w) * w, (l.cy - 0.5 * l.h) * h, l.w * w, l.h * h});
      const fs::path pred_path = fs::path(pred_dir) / (id + ".txt");
      if (fs::exists(pred_path)) s.preds = eval::parse_prediction_text(read_text(pred_path), w, h);
      samples.push_back(std::move(s));
    }

    const eval::EvalReport report = eval::evaluate(samples, cfg.eval);
    ensure_dir(out_dir);
    const std::string table = eval::report_table(report, name);
    write_text(fs::path(out_dir) / "report.json", eval::report_json(report, cfg.master_seed));
    write_text(fs::path(out_dir) / "report.txt", table);
    out << table;
    return kSuccess;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometry-aware cut-and-paste dataset builder and detection evaluator", "simpaste"};
  app.require_subcommand(1);

  IngestCommand ingest;
  SynthCommand synth;
  ExtractCommand extract;
  ComposeCommand compose;
  EvalCommand evaluate;
  CLI::App* ingest_app = app.add_subcommand("ingest", "validate a cutout directory and write buffer.json");
  CLI::App* synth_app = app.add_subcommand("synth", "render procedural scenes across four lighting levels");
  CLI::App* extract_app = app.add_subcommand("extract", "export scene instances as cutout pairs");
  CLI::App* compose_app = app.add_subcommand("compose", "paste cutouts onto scenes and emit labels");
  CLI::App* eval_app = app.add_subcommand("eval", "score predictions against ground-truth labels");
  ingest.add(ingest_app);
  synth.add(synth_app);
  extract.add(extract_app);
  compose.add(compose_app);
  evaluate.add(eval_app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kFailure;
  }

  try {
    if (*ingest_app) return ingest.run(out, err);
    if (*synth_app) return synth.run(out, err);
    if (*extract_app) return extract.run(out, err);
    if (*compose_app) return compose.run(out, err);
    if (*eval_app) return evaluate.run(out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace simpaste::cli
