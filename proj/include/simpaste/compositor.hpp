#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simpaste/image.hpp"
#include "simpaste/instance_buffer.hpp"
#include "simpaste/mask_geometry.hpp"
#include "simpaste/rng.hpp"

namespace simpaste {

/// One synthetic object in scene coordinates. Axes are computed at
/// construction when the mask has at least two pixels.
class SceneInstance {
 public:
  /// Throws EmptyMask when `mask` has no foreground.
  SceneInstance(int instance_id, Mask mask);

  int instance_id() const { return instance_id_; }
  const Mask& mask() const { return mask_; }
  const BBox& bbox() const { return bbox_; }
  std::size_t area() const { return area_; }
  bool has_axes() const { return axes_.has_value(); }
  /// Throws DegenerateMask for single-pixel instances.
  const PrincipalAxes& axes() const;

 private:
  int instance_id_;
  Mask mask_;
  BBox bbox_;
  std::size_t area_;
  std::optional<PrincipalAxes> axes_;
};

enum class PasteOrder { kAreaDescending, kInput };
/// Which real-mask box feeds the scale factor: after applying theta_rot
/// (default) or the cutout's own upright box.
enum class ScaleReference { kPostRotation, kPreRotation };

struct CompositeConfig {
  int min_paste_area = 64;
  double feather_radius = 0.0;
  PasteOrder paste_order = PasteOrder::kAreaDescending;
  ScaleReference scale_reference = ScaleReference::kPostRotation;
  /// Grow the planned scale when nearest-neighbour sampling leaves the
  /// transformed footprint smaller than the target box.
  bool refine_coverage = true;
};

/// A cutout after rotation, scaling and translation into a scene.
/// `region` is the scene-clipped raster extent that `color` and `mask`
/// cover; `footprint` is the unclipped box of the transformed mask.
struct PositionedCutout {
  std::string id;
  BBox region;
  BBox footprint;
  RgbImage color;
  Mask mask;

  /// The mask placed into a scene-sized raster.
  Mask scene_mask(int scene_width, int scene_height) const;
};

/// Box of the nearest-neighbour transformed mask, without any frame.
/// Throws EmptyMask when nothing survives the transform.
BBox transformed_mask_bbox(const Mask& mask, const AlignmentPlan& plan);

/// Rotates by plan.theta_rot about the mask centroid, scales by plan.scale
/// and moves the centroid to plan.target_centroid in one inverse-mapped
/// pass: bilinear for color, nearest neighbour for the mask. Throws
/// OutOfFrame if no transformed foreground pixel lands inside the scene.
PositionedCutout transform_cutout(const InstanceCutout& cutout, const AlignmentPlan& plan, int scene_width,
                                  int scene_height);

/// theta from the major axes (0 when either side is isotropic), scale from
/// the target box over the (rotated) cutout box, translation to the target
/// centroid. Propagates DegenerateMask.
AlignmentPlan plan_alignment(const InstanceCutout& cutout, const SceneInstance& target,
                             ScaleReference reference = ScaleReference::kPostRotation);

/// Raises plan.scale until the sampled footprint of `cutout_mask` is at least
/// `target` in both dimensions, for at most `max_rounds` rounds. The scale
/// from plan_alignment is measured at unit scale, and resampling at the final
/// scale can drop thin extreme rows.
AlignmentPlan refine_for_coverage(const Mask& cutout_mask, AlignmentPlan plan, const BBox& target,
                                  int max_rounds = 4);

/// Pixel-wise AND. Throws ShapeMismatch on differing dimensions.
Mask clip_to_target(const Mask& transformed_mask, const Mask& target_mask);

/// Per-pixel paste weight: 1 for a hard paste, otherwise min(1, d / r) where
/// d is the Euclidean distance to the nearest in-frame pixel outside the clip.
double feather_weight(const Mask& clip, int x, int y, double feather_radius);

/// Replaces scene pixels inside `clip` with cutout pixels, alpha-mixed near
/// the clip boundary when feather_radius > 0. Pixels outside the clip are
/// untouched. Throws ShapeMismatch on dimension disagreement or when the
/// clip leaves the cutout region.
RgbImage blend(const RgbImage& scene, const PositionedCutout& cutout, const Mask& clip, double feather_radius);

struct CompositeEntry {
  int instance_id = 0;
  std::string cutout_id;
  double theta_rot = 0.0;
  double scale = 0.0;
  Point2 target_centroid;
  std::size_t clipped_area_px = 0;
  BBox target_bbox;
  std::optional<BBox> transformed_bbox;
  bool skipped = false;
  std::string skip_reason;
};

struct CompositeRecord {
  std::string scene_id;
  std::vector<CompositeEntry> entries;

  std::size_t pasted_count() const;
};

struct CompositeResult {
  RgbImage image;
  CompositeRecord record;
  /// Scene-sized clip per record entry; all-background for skipped entries.
  std::vector<Mask> clips;
};

/// Runs sample, plan, transform, clip and blend for every instance in paste
/// order. A failing instance is skipped with its reason; the scene never
/// aborts. Throws EmptyBuffer when the buffer is empty.
CompositeResult compose_scene(const RgbImage& scene_image, const std::vector<SceneInstance>& instances,
                              const CutoutBuffer& buffer, Rng& rng, const CompositeConfig& config,
                              const std::string& scene_id = "");

std::string composite_record_json(const CompositeRecord& record, std::uint64_t seed);

}  // namespace simpaste
