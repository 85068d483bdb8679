#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "simpaste/compositor.hpp"
#include "simpaste/image.hpp"

namespace simpaste {

/// Normalized detection box: class plus center/size as fractions of the image.
struct DetectionLabel {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};

enum class MapEncoding { kIdIndexed, kColorCoded };
/// "id" or "color"; throws EncodingError otherwise.
MapEncoding parse_map_encoding(const std::string& name);

/// One instance per distinct non-zero id, ordered by id.
std::vector<SceneInstance> parse_instance_map(const IdMap& map);
/// One instance per distinct non-black color, ordered by packed 0xRRGGBB;
/// instance ids are assigned 1..n in that order.
std::vector<SceneInstance> parse_instance_map(const RgbImage& map);
/// Dispatches on `encoding`; throws EncodingError when the raster kind does
/// not match the encoding.
std::vector<SceneInstance> parse_instance_map(const std::variant<IdMap, RgbImage>& map, MapEncoding encoding);

DetectionLabel label_from_bbox(const BBox& box, int image_width, int image_height, int class_id = 0);

enum class LabelFormat { kNormalizedText, kJsonManifest };

/// normalized-text: one `class cx cy w h` line per instance (6 decimals).
/// json-manifest: additionally instance_id, area_px, bbox and the cutout id
/// from `provenance` when one is known for the instance.
std::string emit_labels(const std::vector<SceneInstance>& instances, int image_width, int image_height,
                        LabelFormat format, const std::map<int, std::string>& provenance = {});

/// Parses normalized-text labels; blank lines are ignored. Throws
/// EncodingError on malformed lines or out-of-range values.
std::vector<DetectionLabel> parse_label_text(const std::string& text);

/// Pixel box (continuous coordinates) of a normalized label.
struct PixelBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};
PixelBox denormalize(const DetectionLabel& label, int image_width, int image_height);

}  // namespace simpaste
