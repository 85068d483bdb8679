#include "simpaste/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace simpaste {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError("invalid value '" + value + "' for " + key);
  return out;
}

// from_chars for double is missing in some standard libraries.
double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
  if (used != value.size()) throw ConfigError("invalid value '" + value + "' for " + key);
  return v;
}

}  // namespace

PasteOrder parse_paste_order(const std::string& s) {
  if (s == "area_desc") return PasteOrder::kAreaDescending;
  if (s == "input") return PasteOrder::kInput;
  throw ConfigError("paste_order must be area_desc or input, got '" + s + "'");
}

ScaleReference parse_scale_reference(const std::string& s) {
  if (s == "post_rotation") return ScaleReference::kPostRotation;
  if (s == "pre_rotation") return ScaleReference::kPreRotation;
  throw ConfigError("scale_reference must be post_rotation or pre_rotation, got '" + s + "'");
}

eval::ApMode parse_ap_mode(const std::string& s) {
  if (s == "all_points" || s == "all-points") return eval::ApMode::kAllPoints;
  if (s == "101_point" || s == "101-point") return eval::ApMode::kPoints101;
  throw ConfigError("ap_mode must be all_points or 101_point, got '" + s + "'");
}

void apply_config_text(const std::string& text, RunConfig& config) {
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "master_seed") {
      config.master_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "workers") {
      config.workers = parse_number<int>(key, value);
    } else if (key == "min_paste_area") {
      config.compositor.min_paste_area = parse_number<int>(key, value);
    } else if (key == "min_cutout_area") {
      config.min_cutout_area = parse_number<int>(key, value);
    } else if (key == "feather_radius") {
      config.compositor.feather_radius = parse_real(key, value);
    } else if (key == "refine_coverage") {
      if (value != "true" && value != "false") throw ConfigError("refine_coverage must be true or false");
      config.compositor.refine_coverage = value == "true";
    } else if (key == "paste_order") {
      config.compositor.paste_order = parse_paste_order(value);
    } else if (key == "scale_reference") {
      config.compositor.scale_reference = parse_scale_reference(value);
    } else if (key == "instance_encoding") {
      try {
        config.instance_encoding = parse_map_encoding(value);
      } catch (const EncodingError& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "conf_thresh") {
      config.eval.conf_thresh = parse_real(key, value);
    } else if (key == "iou_thresh") {
      config.eval.iou_thresh = parse_real(key, value);
    } else if (key == "ap_mode") {
      config.eval.ap_mode = parse_ap_mode(value);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  validate(config);
}

void apply_config_file(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(ss.str(), config);
}

void validate(const RunConfig& config) {
  if (config.workers < 1) throw ConfigError("workers must be >= 1");
  if (config.compositor.min_paste_area < 0) throw ConfigError("min_paste_area must be >= 0");
  if (config.min_cutout_area < 1) throw ConfigError("min_cutout_area must be >= 1");
  if (!(config.compositor.feather_radius >= 0.0)) throw ConfigError("feather_radius must be >= 0");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(config.eval.conf_thresh)) throw ConfigError("conf_thresh must lie in [0, 1]");
  if (!unit(config.eval.iou_thresh)) throw ConfigError("iou_thresh must lie in [0, 1]");
}

}  // namespace simpaste
