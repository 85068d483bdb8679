#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "simpaste/scene_synth.hpp"

using namespace simpaste;

TEST_CASE("synth_scene with zero instances is background only") {
  SynthSceneSpec spec;
  spec.n_instances = 0;
  spec.seed = 5;
  const SynthScene s = synth_scene(spec);
  CHECK(s.instances.empty());
  CHECK(s.image.width() == 256);
  CHECK(s.image.height() == 192);
  for (auto id : s.instance_map.ids()) REQUIRE(id == 0);
}

TEST_CASE("synth_scene single instance follows the sampled orientation") {
  for (double deg : {30.0, -45.0, 70.0}) {
    SynthSceneSpec spec;
    spec.n_instances = 1;
    spec.size_min = spec.size_max = 120;
    spec.orientation_min = spec.orientation_max = radians(deg);
    spec.seed = 11;
    const SynthScene s = synth_scene(spec);
    REQUIRE(s.instances.size() == 1);
    CHECK(s.instances[0].instance_id() == 1);
    const double got = s.instances[0].axes().angle();
    CHECK(degrees(oracle::axis_misalignment(got, radians(deg))) <= 3.0);
  }
}

TEST_CASE("synth_scene is deterministic under its seed") {
  SynthSceneSpec spec;
  spec.n_instances = 6;
  spec.n_occluders = 3;
  spec.palette = TexturePalette::kNatural;
  spec.seed = 99;
  const SynthScene a = synth_scene(spec), b = synth_scene(spec);
  CHECK(a.image == b.image);
  CHECK(a.instance_map == b.instance_map);
  spec.seed = 100;
  CHECK_FALSE(synth_scene(spec).image == a.image);
}

TEST_CASE("synth_scene masks partition the labelled pixels") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthSceneSpec spec;
    spec.n_instances = 8;
    spec.n_occluders = 4;
    spec.seed = seed;
    const SynthScene s = synth_scene(spec);
    std::set<int> ids;
    for (const auto& inst : s.instances) {
      CHECK(ids.insert(inst.instance_id()).second);
      const BBox b = inst.bbox();
      CHECK(b.x_min >= 0);
      CHECK(b.y_min >= 0);
      CHECK(b.x_max() < spec.width);
      CHECK(b.y_max() < spec.height);
      CHECK(inst.bbox() == oracle::bbox_scan(inst.mask()));
    }
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        int owners = 0;
        for (const auto& inst : s.instances)
          if (inst.mask().at(x, y)) {
            ++owners;
            REQUIRE(s.instance_map.at(x, y) == inst.instance_id());
          }
        REQUIRE(owners == (s.instance_map.at(x, y) != 0 ? 1 : 0));
      }
  }
}

TEST_CASE("synth_scene lighting scales brightness monotonically") {
  SynthSceneSpec spec;
  spec.n_instances = 3;
  spec.seed = 8;
  auto mean = [&](LightingLevel l) {
    spec.lighting = l;
    const auto& d = synth_scene(spec).image.data();
    return std::accumulate(d.begin(), d.end(), 0.0) / d.size();
  };
  const double low = mean(LightingLevel::kLow), med = mean(LightingLevel::kMedium);
  const double high = mean(LightingLevel::kHigh), back = mean(LightingLevel::kBacklight);
  CHECK(low < med);
  CHECK(med < high);
  CHECK(high < back);
}

TEST_CASE("synth_scene rejects invalid specs") {
  SynthSceneSpec spec;
  spec.size_min = 50;
  spec.size_max = 40;
  CHECK_THROWS_AS(synth_scene(spec), SpecError);
  spec = {};
  spec.width = 0;
  CHECK_THROWS_AS(synth_scene(spec), SpecError);
  spec = {};
  spec.n_instances = -1;
  CHECK_THROWS_AS(synth_scene(spec), SpecError);
  spec = {};
  spec.size_max = 500;
  CHECK_THROWS_AS(synth_scene(spec), SpecError);
  CHECK_THROWS_AS(parse_lighting_level("dusk"), SpecError);
  CHECK(parse_lighting_level("backlight") == LightingLevel::kBacklight);
}

TEST_CASE("apportion_levels") {
  CHECK(apportion_levels(40) == std::array<int, 4>{4, 15, 12, 9});
  CHECK(apportion_levels(4) == std::array<int, 4>{1, 1, 1, 1});
  CHECK(apportion_levels(0) == std::array<int, 4>{0, 0, 0, 0});
  CHECK(apportion_levels(1891) == std::array<int, 4>{209, 707, 559, 416});
  for (int n = 1; n <= 300; ++n) {
    const auto c = apportion_levels(n);
    CHECK(std::accumulate(c.begin(), c.end(), 0) == n);
    if (n >= 4)
      for (int v : c) CHECK(v >= 1);
    // Largest remainder never strays more than one scene from the exact quota.
    if (n >= 20)
      for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::fabs(c[i] - n * kDefaultLevelWeights[i] / 1891.0) < 1.0);
  }
}

TEST_CASE("instance colors are unique and non-black") {
  std::set<std::uint32_t> seen;
  for (int id = 1; id <= 65535; ++id) {
    const Rgb c = instance_color(static_cast<std::uint16_t>(id));
    const std::uint32_t packed = (c[0] << 16) | (c[1] << 8) | c[2];
    REQUIRE(packed != 0);
    REQUIRE(seen.insert(packed).second);
  }
}
