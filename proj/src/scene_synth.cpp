#include "simpaste/scene_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "simpaste/rng.hpp"

namespace simpaste {

LightingCurve lighting_curve(LightingLevel level) {
  switch (level) {
    case LightingLevel::kLow:
      return {0.5, 1.2};
    case LightingLevel::kMedium:
      return {1.0, 1.0};
    case LightingLevel::kHigh:
      return {1.5, 0.9};
    case LightingLevel::kBacklight:
      return {2.2, 0.7};
  }
  return {1.0, 1.0};
}

std::string to_string(LightingLevel level) {
  switch (level) {
    case LightingLevel::kLow:
      return "low";
    case LightingLevel::kMedium:
      return "medium";
    case LightingLevel::kHigh:
      return "high";
    case LightingLevel::kBacklight:
      return "backlight";
  }
  return "medium";
}

LightingLevel parse_lighting_level(const std::string& name) {
  for (LightingLevel l : kLightingLevels)
    if (to_string(l) == name) return l;
  throw SpecError("unknown lighting level '" + name + "'");
}

void SynthSceneSpec::validate() const {
  if (width < 1 || height < 1) throw SpecError("scene dimensions must be positive");
  if (width > 8192 || height > 8192) throw SpecError("scene dimensions exceed 8192");
  if (n_instances < 0) throw SpecError("n_instances must be >= 0");
  if (n_instances > 65535) throw SpecError("n_instances must fit a 16-bit id");
  if (n_occluders < 0) throw SpecError("n_occluders must be >= 0");
  if (!(size_min >= 4.0) || !(size_max >= size_min)) throw SpecError("size range must satisfy 4 <= min <= max");
  if (size_max > std::min(width, height)) throw SpecError("size range exceeds the frame");
  if (!(orientation_max >= orientation_min)) throw SpecError("orientation range is inverted");
}

namespace {

struct Ellipse {
  double cx, cy, a, b, phi;
};

// Calls fn(x, y, r2) for pixel centers inside the ellipse; r2 is the
// normalized squared radius in [0, 1].
template <typename Fn>
void raster_ellipse(const Ellipse& e, int width, int height, Fn fn) {
  const double c = std::cos(e.phi);
  const double s = std::sin(e.phi);
  const double ex = std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s);
  const double ey = std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c);
  const int x0 = std::max(0, static_cast<int>(std::floor(e.cx - ex)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(e.cx + ex)));
  const int y0 = std::max(0, static_cast<int>(std::floor(e.cy - ey)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(e.cy + ey)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - e.cx;
      const double dy = y - e.cy;
      const double u = (c * dx + s * dy) / e.a;
      const double v = (-s * dx + c * dy) / e.b;
      const double r2 = u * u + v * v;
      if (r2 <= 1.0) fn(x, y, r2);
    }
  }
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

Rgb shade(const std::array<double, 3>& base, double r2, double noise) {
  // Spherical-looking berry: brighter center, darker rim.
  const double k = 0.55 + 0.45 * std::sqrt(std::max(0.0, 1.0 - r2)) + noise;
  return {to_byte(base[0] * k), to_byte(base[1] * k), to_byte(base[2] * k)};
}

std::array<double, 3> natural_base(Rng& rng) {
  // Either a green/yellow table grape or a red/purple one.
  if (rng.uniform01() < 0.5) {
    return {rng.uniform(120, 190), rng.uniform(150, 210), rng.uniform(60, 110)};
  }
  return {rng.uniform(90, 150), rng.uniform(30, 70), rng.uniform(70, 120)};
}

}  // namespace

SynthScene synth_scene(const SynthSceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int w = spec.width;
  const int h = spec.height;

  SynthScene scene;
  scene.image = RgbImage(w, h);
  scene.instance_map = IdMap(w, h);

  // Background: vertical foliage-to-soil gradient with mild per-row noise.
  for (int y = 0; y < h; ++y) {
    const double t = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
    const double jitter = rng.uniform(-6.0, 6.0);
    for (int x = 0; x < w; ++x) {
      const double stripe = 8.0 * std::sin(0.11 * x + 0.07 * y);
      scene.image.set(x, y,
                      {to_byte(45 + 35 * t + jitter + stripe), to_byte(85 - 25 * t + jitter + stripe),
                       to_byte(35 + 10 * t + jitter)});
    }
  }

  const std::array<double, 3> sim_base = {110.0, 150.0, 70.0};
  for (int k = 0; k < spec.n_instances; ++k) {
    const auto id = static_cast<std::uint16_t>(k + 1);
    const double length = rng.uniform(spec.size_min, spec.size_max);
    const double phi = rng.uniform(spec.orientation_min, spec.orientation_max);
    const double half = 0.5 * length;
    const double cx = w > 2 * half ? rng.uniform(half, w - half) : 0.5 * w;
    const double cy = h > 2 * half ? rng.uniform(half, h - half) : 0.5 * h;
    const std::array<double, 3> base = spec.palette == TexturePalette::kNatural ? natural_base(rng) : sim_base;
    const double core_b = 0.2 * length;

    auto paint = [&](const Ellipse& e, const std::array<double, 3>& color, double noise_amp) {
      raster_ellipse(e, w, h, [&](int x, int y, double r2) {
        const double noise = noise_amp > 0 ? rng.uniform(-noise_amp, noise_amp) : 0.0;
        scene.image.set(x, y, shade(color, r2, noise));
        scene.instance_map.set(x, y, id);
      });
    };

    paint({cx, cy, half, core_b, phi}, base, 0.0);

    const int n_berries = 12 + static_cast<int>(length / 4);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    for (int b = 0; b < n_berries; ++b) {
      const double t = rng.uniform(-0.85, 0.85);
      const double lateral = rng.uniform(-1.0, 1.0) * core_b * std::sqrt(1.0 - t * t) * 0.9;
      const double radius = length * rng.uniform(0.07, 0.10);
      const double along = t * half;
      const Ellipse berry{cx + c * along - s * lateral, cy + s * along + c * lateral, radius,
                          radius * rng.uniform(0.85, 1.0), rng.uniform(0.0, kPi)};
      std::array<double, 3> color = base;
      double noise_amp = 0.0;
      if (spec.palette == TexturePalette::kNatural) {
        for (double& ch : color) ch *= rng.uniform(0.85, 1.15);
        noise_amp = 0.06;
      }
      paint(berry, color, noise_amp);
    }
  }

  for (int k = 0; k < spec.n_occluders; ++k) {
    const double len = rng.uniform(0.5, 1.0) * spec.size_max;
    const Ellipse leaf{rng.uniform(0, w), rng.uniform(0, h), 0.5 * len, 0.22 * len, rng.uniform(-kPi / 2, kPi / 2)};
    const std::array<double, 3> green = {55, 115, 40};
    raster_ellipse(leaf, w, h, [&](int x, int y, double r2) {
      scene.image.set(x, y, shade(green, 0.3 * r2, 0.0));
      scene.instance_map.set(x, y, 0);
    });
  }

  const LightingCurve curve = lighting_curve(spec.lighting);
  for (auto& v : scene.image.data()) v = to_byte(255.0 * curve.gain * std::pow(v / 255.0, curve.gamma));

  std::vector<Mask> masks(static_cast<std::size_t>(spec.n_instances), Mask());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint16_t id = scene.instance_map.at(x, y);
      if (id == 0) continue;
      Mask& m = masks[id - 1];
      if (m.empty_raster()) m = Mask(w, h);
      m.set(x, y);
    }
  }
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (!masks[i].empty_raster()) scene.instances.emplace_back(static_cast<int>(i + 1), std::move(masks[i]));
  }
  return scene;
}

Rgb instance_color(std::uint16_t id) {
  const std::uint32_t v = (static_cast<std::uint32_t>(id) * 2654435761u) & 0xFFFFFFu;
  return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>((v >> 8) & 0xFF),
          static_cast<std::uint8_t>(v & 0xFF)};
}

RgbImage color_coded_map(const IdMap& map) {
  RgbImage out(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (const auto id = map.at(x, y); id != 0) out.set(x, y, instance_color(id));
  return out;
}

std::string scene_spec_json(const SynthSceneSpec& spec, const std::string& scene_id, std::uint64_t master_seed) {
  nlohmann::ordered_json j;
  j["scene_id"] = scene_id;
  j["master_seed"] = master_seed;
  j["seed"] = spec.seed;
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["n_instances"] = spec.n_instances;
  j["size_range"] = {spec.size_min, spec.size_max};
  j["orientation_range"] = {spec.orientation_min, spec.orientation_max};
  j["n_occluders"] = spec.n_occluders;
  j["lighting_level"] = to_string(spec.lighting);
  const LightingCurve curve = lighting_curve(spec.lighting);
  j["lighting_curve"] = {{"gain", curve.gain}, {"gamma", curve.gamma}};
  j["palette"] = spec.palette == TexturePalette::kNatural ? "natural" : "simulator";
  return j.dump(2) + "\n";
}

std::array<int, 4> apportion_levels(int n, const std::array<int, 4>& weights) {
  std::array<int, 4> counts{};
  if (n <= 0) return counts;
  const long long total = std::accumulate(weights.begin(), weights.end(), 0LL);
  if (total <= 0) throw SpecError("level weights must sum to a positive value");

  std::array<long long, 4> remainder{};
  int assigned = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const long long num = static_cast<long long>(n) * weights[i];
    counts[i] = static_cast<int>(num / total);
    remainder[i] = num % total;
    assigned += counts[i];
  }
  std::array<std::size_t, 4> idx = {0, 1, 2, 3};
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (int k = 0; assigned < n; ++k, ++assigned) ++counts[idx[static_cast<std::size_t>(k) % 4]];

  if (n >= 4) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (counts[i] > 0) continue;
      const auto largest = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      --counts[largest];
      ++counts[i];
    }
  }
  return counts;
}

}  // namespace simpaste
