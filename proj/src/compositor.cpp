#include "simpaste/compositor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace simpaste {

SceneInstance::SceneInstance(int instance_id, Mask mask)
    : instance_id_(instance_id), mask_(std::move(mask)), bbox_(mask_bbox(mask_)), area_(mask_.count()) {
  if (area_ >= 2) axes_ = compute_pca(mask_);
}

const PrincipalAxes& SceneInstance::axes() const {
  if (!axes_) throw DegenerateMask("instance " + std::to_string(instance_id_) + " has fewer than 2 pixels");
  return *axes_;
}

Mask PositionedCutout::scene_mask(int scene_width, int scene_height) const {
  Mask out(scene_width, scene_height);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      const int sx = region.x_min + x;
      const int sy = region.y_min + y;
      if (sx >= 0 && sy >= 0 && sx < scene_width && sy < scene_height) out.set(sx, sy);
    }
  }
  return out;
}

namespace {

// Inverse of q = target + scale * R(theta) * (p - centroid).
class InverseMap {
 public:
  InverseMap(Point2 source_centroid, const AlignmentPlan& plan)
      : c_(source_centroid),
        t_(plan.target_centroid),
        cos_(std::cos(plan.theta_rot) / plan.scale),
        sin_(std::sin(plan.theta_rot) / plan.scale) {}

  Point2 operator()(double qx, double qy) const {
    const double dx = qx - t_.x;
    const double dy = qy - t_.y;
    return {c_.x + cos_ * dx + sin_ * dy, c_.y - sin_ * dx + cos_ * dy};
  }

 private:
  Point2 c_, t_;
  double cos_, sin_;
};

struct IntRange {
  int x0, y0, x1, y1;  // inclusive
};

// Scene pixels whose inverse image can land on a foreground pixel of `box`.
IntRange forward_extent(const BBox& box, Point2 centroid, const AlignmentPlan& plan) {
  const double c = std::cos(plan.theta_rot) * plan.scale;
  const double s = std::sin(plan.theta_rot) * plan.scale;
  double min_x = INFINITY, min_y = INFINITY, max_x = -INFINITY, max_y = -INFINITY;
  const double xs[2] = {box.x_min - 0.5, box.x_max() + 0.5};
  const double ys[2] = {box.y_min - 0.5, box.y_max() + 0.5};
  for (double px : xs) {
    for (double py : ys) {
      const double dx = px - centroid.x;
      const double dy = py - centroid.y;
      const double qx = plan.target_centroid.x + c * dx - s * dy;
      const double qy = plan.target_centroid.y + s * dx + c * dy;
      min_x = std::min(min_x, qx);
      max_x = std::max(max_x, qx);
      min_y = std::min(min_y, qy);
      max_y = std::max(max_y, qy);
    }
  }
  return {static_cast<int>(std::floor(min_x)) - 1, static_cast<int>(std::floor(min_y)) - 1,
          static_cast<int>(std::ceil(max_x)) + 1, static_cast<int>(std::ceil(max_y)) + 1};
}

int nearest(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::uint8_t bilinear_channel(const RgbImage& img, double x, double y, int ch) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1 - fx) * img.at(x0, y0)[ch] + fx * img.at(x1, y0)[ch];
  const double bottom = (1 - fx) * img.at(x0, y1)[ch] + fx * img.at(x1, y1)[ch];
  const double v = (1 - fy) * top + fy * bottom;
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void validate_plan(const AlignmentPlan& plan) {
  if (!(plan.scale > 0.0) || !std::isfinite(plan.scale)) throw SpecError("alignment scale must be finite and > 0");
  if (!std::isfinite(plan.theta_rot)) throw SpecError("alignment angle must be finite");
}

}  // namespace

BBox transformed_mask_bbox(const Mask& mask, const AlignmentPlan& plan) {
  validate_plan(plan);
  const Point2 centroid = mask_centroid(mask);
  const IntRange r = forward_extent(mask_bbox(mask), centroid, plan);
  const InverseMap inv(centroid, plan);
  int x0 = INT32_MAX, y0 = INT32_MAX, x1 = INT32_MIN, y1 = INT32_MIN;
  for (int qy = r.y0; qy <= r.y1; ++qy) {
    for (int qx = r.x0; qx <= r.x1; ++qx) {
      const Point2 p = inv(qx, qy);
      if (!mask.get_or_false(nearest(p.x), nearest(p.y))) continue;
      x0 = std::min(x0, qx);
      x1 = std::max(x1, qx);
      y0 = std::min(y0, qy);
      y1 = std::max(y1, qy);
    }
  }
  if (x1 < x0) throw EmptyMask("transformed mask is empty");
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

PositionedCutout transform_cutout(const InstanceCutout& cutout, const AlignmentPlan& plan, int scene_width,
                                  int scene_height) {
  validate_plan(plan);
  if (cutout.color.width() != cutout.mask.width() || cutout.color.height() != cutout.mask.height())
    throw ShapeMismatch("cutout " + cutout.id + ": color and mask dimensions differ");

  PositionedCutout out;
  out.id = cutout.id;
  try {
    out.footprint = transformed_mask_bbox(cutout.mask, plan);
  } catch (const EmptyMask&) {
    throw OutOfFrame("cutout " + cutout.id + " vanishes under the transform");
  }

  const int x0 = std::max(out.footprint.x_min, 0);
  const int y0 = std::max(out.footprint.y_min, 0);
  const int x1 = std::min(out.footprint.x_max(), scene_width - 1);
  const int y1 = std::min(out.footprint.y_max(), scene_height - 1);
  if (x1 < x0 || y1 < y0) throw OutOfFrame("cutout " + cutout.id + " lands outside the scene");

  out.region = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  out.color = RgbImage(out.region.width, out.region.height);
  out.mask = Mask(out.region.width, out.region.height);

  const InverseMap inv(mask_centroid(cutout.mask), plan);
  bool any = false;
  for (int qy = y0; qy <= y1; ++qy) {
    for (int qx = x0; qx <= x1; ++qx) {
      const Point2 p = inv(qx, qy);
      const int lx = qx - x0;
      const int ly = qy - y0;
      if (cutout.mask.get_or_false(nearest(p.x), nearest(p.y))) {
        out.mask.set(lx, ly);
        any = true;
      }
      out.color.set(lx, ly,
                    {bilinear_channel(cutout.color, p.x, p.y, 0), bilinear_channel(cutout.color, p.x, p.y, 1),
                     bilinear_channel(cutout.color, p.x, p.y, 2)});
    }
  }
  if (!any) throw OutOfFrame("cutout " + cutout.id + " lands outside the scene");
  return out;
}

AlignmentPlan plan_alignment(const InstanceCutout& cutout, const SceneInstance& target, ScaleReference reference) {
  const PrincipalAxes real = compute_pca(cutout.mask);
  const PrincipalAxes& sim = target.axes();

  AlignmentPlan plan;
  // An isotropic mask has no preferred axis to align.
  plan.theta_rot = (real.isotropic() || sim.isotropic()) ? 0.0 : rotation_angle(real, sim);
  plan.target_centroid = sim.centroid;

  BBox real_box;
  if (reference == ScaleReference::kPostRotation) {
    real_box = transformed_mask_bbox(cutout.mask, {plan.theta_rot, 1.0, real.centroid});
  } else {
    real_box = mask_bbox(cutout.mask);
  }
  plan.scale = scale_factor(target.bbox(), real_box);
  return plan;
}

AlignmentPlan refine_for_coverage(const Mask& cutout_mask, AlignmentPlan plan, const BBox& target, int max_rounds) {
  for (int round = 0; round < max_rounds; ++round) {
    const BBox got = transformed_mask_bbox(cutout_mask, plan);
    const double need = std::max(static_cast<double>(target.width) / got.width,
                                 static_cast<double>(target.height) / got.height);
    if (need <= 1.0) break;
    plan.scale *= need;
  }
  return plan;
}

Mask clip_to_target(const Mask& transformed_mask, const Mask& target_mask) {
  return mask_and(transformed_mask, target_mask);
}

double feather_weight(const Mask& clip, int x, int y, double feather_radius) {
  if (!clip.at(x, y)) return 0.0;
  if (feather_radius <= 0.0) return 1.0;
  const int reach = static_cast<int>(std::ceil(feather_radius));
  double best = feather_radius;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const int nx = x + dx;
      const int ny = y + dy;
      if (nx < 0 || ny < 0 || nx >= clip.width() || ny >= clip.height()) continue;
      if (clip.at(nx, ny)) continue;
      best = std::min(best, std::hypot(static_cast<double>(dx), static_cast<double>(dy)));
    }
  }
  return best / feather_radius;
}

RgbImage blend(const RgbImage& scene, const PositionedCutout& cutout, const Mask& clip, double feather_radius) {
  if (clip.width() != scene.width() || clip.height() != scene.height())
    throw ShapeMismatch("clip and scene dimensions differ");
  if (cutout.color.width() != cutout.region.width || cutout.color.height() != cutout.region.height)
    throw ShapeMismatch("cutout raster does not match its region");

  RgbImage out = scene;
  for (int y = 0; y < clip.height(); ++y) {
    for (int x = 0; x < clip.width(); ++x) {
      if (!clip.at(x, y)) continue;
      const int lx = x - cutout.region.x_min;
      const int ly = y - cutout.region.y_min;
      if (lx < 0 || ly < 0 || lx >= cutout.region.width || ly >= cutout.region.height)
        throw ShapeMismatch("clip extends outside the cutout region");
      const Rgb src = cutout.color.at(lx, ly);
      const double w = feather_weight(clip, x, y, feather_radius);
      if (w >= 1.0) {
        out.set(x, y, src);
        continue;
      }
      const Rgb dst = scene.at(x, y);
      Rgb mixed;
      for (int c = 0; c < 3; ++c) mixed[c] = static_cast<std::uint8_t>(std::lround(w * src[c] + (1.0 - w) * dst[c]));
      out.set(x, y, mixed);
    }
  }
  return out;
}

std::size_t CompositeRecord::pasted_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const CompositeEntry& e) { return !e.skipped; }));
}

CompositeResult compose_scene(const RgbImage& scene_image, const std::vector<SceneInstance>& instances,
                              const CutoutBuffer& buffer, Rng& rng, const CompositeConfig& config,
                              const std::string& scene_id) {
  if (buffer.empty()) throw EmptyBuffer("compose_scene needs a non-empty buffer");

  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.paste_order == PasteOrder::kAreaDescending) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (instances[a].area() != instances[b].area()) return instances[a].area() > instances[b].area();
      return instances[a].instance_id() < instances[b].instance_id();
    });
  }

  const int w = scene_image.width();
  const int h = scene_image.height();
  CompositeResult result;
  result.image = scene_image;
  result.record.scene_id = scene_id;

  for (std::size_t idx : order) {
    const SceneInstance& inst = instances[idx];
    CompositeEntry entry;
    entry.instance_id = inst.instance_id();
    entry.target_bbox = inst.bbox();
    Mask clip(w, h);

    auto skip = [&](std::string reason) {
      entry.skipped = true;
      entry.skip_reason = std::move(reason);
    };

    if (inst.mask().width() != w || inst.mask().height() != h) {
      skip("ShapeMismatch: instance mask does not match scene");
    } else if (inst.area() < static_cast<std::size_t>(std::max(config.min_paste_area, 0))) {
      skip("area " + std::to_string(inst.area()) + " px below min_paste_area " +
           std::to_string(config.min_paste_area));
    } else {
      const InstanceCutout& cutout = sample_cutout(buffer, rng);
      entry.cutout_id = cutout.id;
      try {
        AlignmentPlan plan = plan_alignment(cutout, inst, config.scale_reference);
        if (config.refine_coverage) plan = refine_for_coverage(cutout.mask, plan, inst.bbox());
        entry.theta_rot = plan.theta_rot;
        entry.scale = plan.scale;
        entry.target_centroid = plan.target_centroid;
        const PositionedCutout placed = transform_cutout(cutout, plan, w, h);
        entry.transformed_bbox = placed.footprint;
        clip = clip_to_target(placed.scene_mask(w, h), inst.mask());
        entry.clipped_area_px = clip.count();
        if (entry.clipped_area_px == 0) {
          skip("empty clip");
        } else {
          result.image = blend(result.image, placed, clip, config.feather_radius);
        }
      } catch (const Error& e) {
        skip(e.what());
        clip = Mask(w, h);
      }
    }
    result.record.entries.push_back(std::move(entry));
    result.clips.push_back(std::move(clip));
  }
  return result;
}

std::string composite_record_json(const CompositeRecord& record, std::uint64_t seed) {
  auto box_json = [](const BBox& b) {
    return nlohmann::ordered_json{{"x_min", b.x_min}, {"y_min", b.y_min}, {"width", b.width}, {"height", b.height}};
  };
  nlohmann::ordered_json j;
  j["scene_id"] = record.scene_id;
  j["seed"] = seed;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : record.entries) {
    nlohmann::ordered_json je;
    je["instance_id"] = e.instance_id;
    je["cutout_id"] = e.cutout_id;
    je["theta_rot"] = e.theta_rot;
    je["scale"] = e.scale;
    je["target_centroid"] = {e.target_centroid.x, e.target_centroid.y};
    je["clipped_area_px"] = e.clipped_area_px;
    je["target_bbox"] = box_json(e.target_bbox);
    je["transformed_bbox"] = e.transformed_bbox ? box_json(*e.transformed_bbox) : nlohmann::ordered_json(nullptr);
    je["skipped"] = e.skipped;
    je["skip_reason"] = e.skip_reason;
    j["entries"].push_back(std::move(je));
  }
  return j.dump(2) + "\n";
}

}  // namespace simpaste
