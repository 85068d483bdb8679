#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "simpaste/compositor.hpp"
#include "simpaste/image.hpp"

namespace simpaste {

enum class LightingLevel { kLow, kMedium, kHigh, kBacklight };

inline constexpr std::array<LightingLevel, 4> kLightingLevels = {LightingLevel::kLow, LightingLevel::kMedium,
                                                                 LightingLevel::kHigh, LightingLevel::kBacklight};

struct LightingCurve {
  double gain;
  double gamma;
};

/// Global exposure applied per level: v' = clamp(255 * gain * (v / 255)^gamma).
LightingCurve lighting_curve(LightingLevel level);
std::string to_string(LightingLevel level);
/// Throws SpecError for an unknown name.
LightingLevel parse_lighting_level(const std::string& name);

/// Flat "simulator" bunch texture, or a per-berry jittered "natural" one used
/// to stand in for real cutouts.
enum class TexturePalette { kSimulator, kNatural };

struct SynthSceneSpec {
  int width = 256;
  int height = 192;
  int n_instances = 5;
  double size_min = 40.0;  // bunch length in pixels
  double size_max = 90.0;
  double orientation_min = -1.2;  // radians, image coordinates
  double orientation_max = 1.2;
  int n_occluders = 0;  // leaves drawn over the bunches
  LightingLevel lighting = LightingLevel::kMedium;
  TexturePalette palette = TexturePalette::kSimulator;
  std::uint64_t seed = 0;

  /// Throws SpecError on invalid ranges.
  void validate() const;
};

struct SynthScene {
  RgbImage image;
  IdMap instance_map;
  std::vector<SceneInstance> instances;
};

/// Renders bunches as clusters of overlapping filled ellipses elongated along
/// a sampled orientation. Later instances occlude earlier ones; occluder
/// leaves reset the map to background. Masks are read back from the final
/// map, so fully hidden instances are dropped.
SynthScene synth_scene(const SynthSceneSpec& spec);

/// Unique non-black color per instance id (odd-multiplier bijection on 24 bits).
Rgb instance_color(std::uint16_t id);
RgbImage color_coded_map(const IdMap& map);

std::string scene_spec_json(const SynthSceneSpec& spec, const std::string& scene_id, std::uint64_t master_seed);

/// Reference split of the four lighting levels (low, medium, high, backlight).
inline constexpr std::array<int, 4> kDefaultLevelWeights = {209, 707, 559, 416};

/// Largest-remainder apportionment of `n` scenes over `weights`. When n >= the
/// number of levels, every level receives at least one scene (taken from the
/// currently largest level).
std::array<int, 4> apportion_levels(int n, const std::array<int, 4>& weights = kDefaultLevelWeights);

}  // namespace simpaste
