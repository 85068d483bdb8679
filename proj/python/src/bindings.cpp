#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "simpaste/cli.hpp"
#include "simpaste/compositor.hpp"
#include "simpaste/eval.hpp"
#include "simpaste/labels.hpp"
#include "simpaste/mask_geometry.hpp"
#include "simpaste/scene_synth.hpp"

namespace py = pybind11;
using namespace simpaste;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using U16Array = py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>;
using BoxTuple = std::tuple<double, double, double, double>;

Mask to_mask(const U8Array& a) {
  if (a.ndim() != 2) throw ShapeMismatch("mask must be a 2-D array");
  const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  Mask m(w, h);
  auto r = a.unchecked<2>();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (r(y, x)) m.set(x, y);
  return m;
}

py::array_t<bool> from_mask(const Mask& m) {
  py::array_t<bool> out({m.height(), m.width()});
  auto w = out.mutable_unchecked<2>();
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) w(y, x) = m.at(x, y);
  return out;
}

RgbImage to_rgb(const U8Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw ShapeMismatch("image must be an H x W x 3 array");
  RgbImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), img.data().begin());
  return img;
}

U8Array from_rgb(const RgbImage& img) {
  U8Array out({img.height(), img.width(), 3});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

IdMap to_id_map(const U16Array& a) {
  if (a.ndim() != 2) throw ShapeMismatch("instance map must be a 2-D array");
  IdMap map(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), map.ids().begin());
  return map;
}

U16Array from_id_map(const IdMap& map) {
  U16Array out({map.height(), map.width()});
  std::copy(map.ids().begin(), map.ids().end(), out.mutable_data());
  return out;
}

BoxTuple box_tuple(const BBox& b) { return {b.x_min, b.y_min, b.width, b.height}; }
BBox to_bbox(const std::tuple<int, int, int, int>& t) {
  return {std::get<0>(t), std::get<1>(t), std::get<2>(t), std::get<3>(t)};
}

eval::Box to_box(const BoxTuple& t) { return {std::get<0>(t), std::get<1>(t), std::get<2>(t), std::get<3>(t)}; }

// Predictions as (confidence, x, y, w, h).
std::vector<eval::Detection> to_detections(const std::vector<std::tuple<double, double, double, double, double>>& p) {
  std::vector<eval::Detection> out;
  for (const auto& [conf, x, y, w, h] : p) out.push_back({0, {x, y, w, h}, conf});
  return out;
}

std::vector<eval::Box> to_boxes(const std::vector<BoxTuple>& g) {
  std::vector<eval::Box> out;
  for (const auto& b : g) out.push_back(to_box(b));
  return out;
}

eval::ApMode ap_mode(const std::string& s) {
  if (s == "all_points") return eval::ApMode::kAllPoints;
  if (s == "101_point") return eval::ApMode::kPoints101;
  throw py::value_error("mode must be 'all_points' or '101_point'");
}

py::dict axes_dict(const PrincipalAxes& a) {
  py::dict d;
  d["centroid"] = py::make_tuple(a.centroid.x, a.centroid.y);
  d["major"] = py::make_tuple(a.major.x, a.major.y);
  d["minor"] = py::make_tuple(a.minor.x, a.minor.y);
  d["variance_major"] = a.variance_major;
  d["variance_minor"] = a.variance_minor;
  d["covariance"] = py::make_tuple(a.covariance.xx, a.covariance.xy, a.covariance.yy);
  d["angle"] = a.angle();
  d["pixel_count"] = a.pixel_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_simpaste_core, m) {
  m.doc() = "Native core of simpaste";

  static py::exception<Error> base_error(m, "SimpasteError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::handle(base_error.ptr())(e.what());
      err.attr("kind") = e.kind();
      PyErr_SetObject(base_error.ptr(), err.ptr());
    }
  });

  m.def("mask_bbox", [](const U8Array& a) { return box_tuple(mask_bbox(to_mask(a))); },
        "Tight (x, y, w, h) box of the foreground.");
  m.def("compute_pca", [](const U8Array& a) { return axes_dict(compute_pca(to_mask(a))); },
        "Centroid, principal axes and variances of the foreground pixel coordinates.");
  m.def("rotation_angle",
        [](const U8Array& real, const U8Array& sim) {
          return rotation_angle(compute_pca(to_mask(real)), compute_pca(to_mask(sim)));
        },
        "Signed rotation in (-pi/2, pi/2] taking the real major axis onto the simulated one.");
  m.def("scale_factor",
        [](const std::tuple<int, int, int, int>& sim, const std::tuple<int, int, int, int>& real) {
          return scale_factor(to_bbox(sim), to_bbox(real));
        },
        py::arg("sim_box"), py::arg("real_box"));
  m.def("clip_to_target", [](const U8Array& a, const U8Array& b) { return from_mask(clip_to_target(to_mask(a), to_mask(b))); });

  m.def("iou", [](const BoxTuple& a, const BoxTuple& b) { return eval::iou(to_box(a), to_box(b)); });
  m.def("f1_score", &eval::f1_score, py::arg("precision"), py::arg("recall"));
  m.def("average_precision",
        [](const std::vector<std::tuple<double, double, double, double, double>>& preds,
           const std::vector<BoxTuple>& gts, double iou_thresh, const std::string& mode) {
          return eval::average_precision(to_detections(preds), to_boxes(gts), iou_thresh, ap_mode(mode));
        },
        py::arg("preds"), py::arg("gts"), py::arg("iou_thresh") = 0.5, py::arg("mode") = "all_points",
        "preds: (confidence, x, y, w, h) tuples; gts: (x, y, w, h) tuples.");
  m.def("map_suite",
        [](const std::vector<std::tuple<double, double, double, double, double>>& preds,
           const std::vector<BoxTuple>& gts, const std::string& mode) {
          const eval::MapScores s = eval::map_suite(to_detections(preds), to_boxes(gts), ap_mode(mode));
          return py::make_tuple(s.map50, s.map50_95);
        },
        py::arg("preds"), py::arg("gts"), py::arg("mode") = "all_points");
  m.def("pr_f1",
        [](const std::vector<std::tuple<double, double, double, double, double>>& preds,
           const std::vector<BoxTuple>& gts, double iou_thresh, double conf_thresh) {
          const eval::PrfScores s = eval::pr_f1_at(to_detections(preds), to_boxes(gts), iou_thresh, conf_thresh);
          return py::make_tuple(s.precision, s.recall, s.f1);
        },
        py::arg("preds"), py::arg("gts"), py::arg("iou_thresh") = eval::kDefaultIouThresh,
        py::arg("conf_thresh") = eval::kDefaultConfThresh);

  m.def("synth_scene",
        [](int width, int height, int n_instances, double size_min, double size_max, int n_occluders,
           const std::string& lighting, bool natural, std::uint64_t seed) {
          SynthSceneSpec spec;
          spec.width = width;
          spec.height = height;
          spec.n_instances = n_instances;
          spec.size_min = size_min;
          spec.size_max = size_max;
          spec.n_occluders = n_occluders;
          spec.lighting = parse_lighting_level(lighting);
          spec.palette = natural ? TexturePalette::kNatural : TexturePalette::kSimulator;
          spec.seed = seed;
          const SynthScene s = synth_scene(spec);
          return py::make_tuple(from_rgb(s.image), from_id_map(s.instance_map));
        },
        py::arg("width") = 256, py::arg("height") = 192, py::arg("n_instances") = 5, py::arg("size_min") = 40.0,
        py::arg("size_max") = 90.0, py::arg("n_occluders") = 0, py::arg("lighting") = "medium",
        py::arg("natural") = false, py::arg("seed") = 0,
        "Returns (image H x W x 3 uint8, instance map H x W uint16).");

  m.def("compose",
        [](const U8Array& image, const U16Array& instance_map,
           const std::vector<std::tuple<std::string, U8Array, U8Array>>& cutouts, std::uint64_t seed,
           int min_paste_area, double feather_radius) {
          std::vector<InstanceCutout> items;
          for (const auto& [id, color, mask] : cutouts) {
            InstanceCutout c;
            c.id = id;
            c.color = to_rgb(color);
            c.mask = to_mask(mask);
            c.source = id;
            items.push_back(std::move(c));
          }
          const CutoutBuffer buffer(std::move(items));
          CompositeConfig cfg;
          cfg.min_paste_area = min_paste_area;
          cfg.feather_radius = feather_radius;
          const RgbImage scene = to_rgb(image);
          const std::vector<SceneInstance> instances = parse_instance_map(to_id_map(instance_map));
          Rng rng(seed);
          const CompositeResult r = compose_scene(scene, instances, buffer, rng, cfg);
          return py::make_tuple(from_rgb(r.image), composite_record_json(r.record, seed));
        },
        py::arg("image"), py::arg("instance_map"), py::arg("cutouts"), py::arg("seed") = 0,
        py::arg("min_paste_area") = 64, py::arg("feather_radius") = 0.0,
        "cutouts: (id, color H x W x 3, mask H x W) tuples. Returns (image, record JSON).");

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        "Runs a simpaste subcommand; returns (exit code, stdout, stderr).");
}
