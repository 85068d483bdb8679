#include "simpaste/labels.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace simpaste {

MapEncoding parse_map_encoding(const std::string& name) {
  if (name == "id" || name == "id-indexed") return MapEncoding::kIdIndexed;
  if (name == "color" || name == "color-coded") return MapEncoding::kColorCoded;
  throw EncodingError("unknown instance map encoding '" + name + "'");
}

std::vector<SceneInstance> parse_instance_map(const IdMap& map) {
  std::map<std::uint16_t, Mask> masks;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const std::uint16_t id = map.at(x, y);
      if (id == 0) continue;
      auto [it, inserted] = masks.try_emplace(id, map.width(), map.height());
      it->second.set(x, y);
    }
  }
  std::vector<SceneInstance> out;
  out.reserve(masks.size());
  for (auto& [id, mask] : masks) out.emplace_back(id, std::move(mask));
  return out;
}

std::vector<SceneInstance> parse_instance_map(const RgbImage& map) {
  std::map<std::uint32_t, Mask> masks;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const Rgb c = map.at(x, y);
      const std::uint32_t packed = (std::uint32_t{c[0]} << 16) | (std::uint32_t{c[1]} << 8) | c[2];
      if (packed == 0) continue;
      auto [it, inserted] = masks.try_emplace(packed, map.width(), map.height());
      it->second.set(x, y);
    }
  }
  std::vector<SceneInstance> out;
  out.reserve(masks.size());
  int next_id = 1;
  for (auto& [color, mask] : masks) out.emplace_back(next_id++, std::move(mask));
  return out;
}

std::vector<SceneInstance> parse_instance_map(const std::variant<IdMap, RgbImage>& map, MapEncoding encoding) {
  if (encoding == MapEncoding::kIdIndexed) {
    if (const auto* ids = std::get_if<IdMap>(&map)) return parse_instance_map(*ids);
    throw EncodingError("id-indexed encoding requires a single-channel map");
  }
  if (const auto* colors = std::get_if<RgbImage>(&map)) return parse_instance_map(*colors);
  throw EncodingError("color-coded encoding requires an RGB map");
}

DetectionLabel label_from_bbox(const BBox& box, int image_width, int image_height, int class_id) {
  DetectionLabel l;
  l.class_id = class_id;
  l.cx = (box.x_min + 0.5 * box.width) / image_width;
  l.cy = (box.y_min + 0.5 * box.height) / image_height;
  l.w = static_cast<double>(box.width) / image_width;
  l.h = static_cast<double>(box.height) / image_height;
  return l;
}

namespace {

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string emit_labels(const std::vector<SceneInstance>& instances, int image_width, int image_height,
                        LabelFormat format, const std::map<int, std::string>& provenance) {
  if (format == LabelFormat::kNormalizedText) {
    std::string out;
    for (const auto& inst : instances) {
      const DetectionLabel l = label_from_bbox(inst.bbox(), image_width, image_height);
      out += std::to_string(l.class_id) + " " + fixed6(l.cx) + " " + fixed6(l.cy) + " " + fixed6(l.w) + " " +
             fixed6(l.h) + "\n";
    }
    return out;
  }

  nlohmann::ordered_json j;
  j["image_width"] = image_width;
  j["image_height"] = image_height;
  j["labels"] = nlohmann::ordered_json::array();
  for (const auto& inst : instances) {
    const DetectionLabel l = label_from_bbox(inst.bbox(), image_width, image_height);
    nlohmann::ordered_json e;
    e["instance_id"] = inst.instance_id();
    e["class_id"] = l.class_id;
    e["cx"] = l.cx;
    e["cy"] = l.cy;
    e["w"] = l.w;
    e["h"] = l.h;
    e["bbox"] = {inst.bbox().x_min, inst.bbox().y_min, inst.bbox().width, inst.bbox().height};
    e["area_px"] = inst.area();
    if (auto it = provenance.find(inst.instance_id()); it != provenance.end()) {
      e["cutout_id"] = it->second;
    } else {
      e["cutout_id"] = nullptr;
    }
    j["labels"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::vector<DetectionLabel> parse_label_text(const std::string& text) {
  std::vector<DetectionLabel> out;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    DetectionLabel l;
    std::string extra;
    if (!(fields >> l.class_id >> l.cx >> l.cy >> l.w >> l.h) || (fields >> extra))
      throw EncodingError("malformed label line " + std::to_string(lineno) + ": '" + line + "'");
    const bool ok = l.cx >= 0 && l.cx <= 1 && l.cy >= 0 && l.cy <= 1 && l.w > 0 && l.w <= 1 && l.h > 0 && l.h <= 1;
    if (!ok) throw EncodingError("label values out of range on line " + std::to_string(lineno));
    out.push_back(l);
  }
  return out;
}

PixelBox denormalize(const DetectionLabel& label, int image_width, int image_height) {
  const double w = label.w * image_width;
  const double h = label.h * image_height;
  return {label.cx * image_width - 0.5 * w, label.cy * image_height - 0.5 * h, w, h};
}

}  // namespace simpaste
