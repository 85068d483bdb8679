#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "simpaste/compositor.hpp"
#include "simpaste/eval.hpp"
#include "simpaste/instance_buffer.hpp"
#include "simpaste/labels.hpp"

namespace simpaste {

/// Settings shared by all subcommands. Loaded from a key-value config file
/// and then overridden by command-line flags.
///
/// Config file format: one `key = value` per line, `#` starts a comment,
/// blank lines are ignored. Keys:
///
///   master_seed       unsigned 64-bit integer        (default 0)
///   workers           worker threads, >= 1           (default 1)
///   min_paste_area    pixels                         (default 64)
///   min_cutout_area   pixels                         (default 64)
///   feather_radius    pixels, >= 0                   (default 0)
///   paste_order       area_desc | input              (default area_desc)
///   refine_coverage   true | false                   (default true)
///   scale_reference   post_rotation | pre_rotation   (default post_rotation)
///   instance_encoding id | color                     (default id)
///   conf_thresh       [0, 1]                         (default 0.25)
///   iou_thresh        [0, 1]                         (default 0.3)
///   ap_mode           all_points | 101_point         (default all_points)
struct RunConfig {
  std::uint64_t master_seed = 0;
  int workers = 1;
  int min_cutout_area = kDefaultMinCutoutArea;
  CompositeConfig compositor;
  MapEncoding instance_encoding = MapEncoding::kIdIndexed;
  eval::EvalOptions eval;
};

/// Applies every key in `text` to `config`. Throws ConfigError on unknown
/// keys or invalid values.
void apply_config_text(const std::string& text, RunConfig& config);
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

/// Throws ConfigError on out-of-range values.
void validate(const RunConfig& config);

PasteOrder parse_paste_order(const std::string& s);
ScaleReference parse_scale_reference(const std::string& s);
eval::ApMode parse_ap_mode(const std::string& s);

}  // namespace simpaste
