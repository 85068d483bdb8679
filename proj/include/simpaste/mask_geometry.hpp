#pragma once

#include <numbers>

#include "simpaste/image.hpp"

namespace simpaste {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

/// Integer pixel box; x_min/y_min inclusive, width/height >= 1.
struct BBox {
  int x_min = 0;
  int y_min = 0;
  int width = 1;
  int height = 1;

  int x_max() const { return x_min + width - 1; }
  int y_max() const { return y_min + height - 1; }

  bool operator==(const BBox&) const = default;
};

/// Population covariance of foreground pixel coordinates.
struct Covariance2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  bool operator==(const Covariance2&) const = default;
};

/// Centroid and principal axes of a mask's foreground pixel cloud.
/// `major` is canonicalized so that its angle lies in (-pi/2, pi/2];
/// `minor` is `major` turned by +90 degrees. variance_major >= variance_minor.
struct PrincipalAxes {
  Point2 centroid;
  Point2 major{1.0, 0.0};
  Point2 minor{0.0, 1.0};
  double variance_major = 0.0;
  double variance_minor = 0.0;
  Covariance2 covariance;
  long long pixel_count = 0;

  /// Angle of the major axis, atan2(major.y, major.x), in (-pi/2, pi/2].
  double angle() const;
  /// variance_major / variance_minor; +inf for a line.
  double elongation() const;
  /// Eigenvalue gap below kIsotropicGap; the axis direction is arbitrary.
  bool isotropic() const;

  bool operator==(const PrincipalAxes&) const = default;
};

/// Signed rotation, uniform scale and translation target applied to a cutout.
struct AlignmentPlan {
  double theta_rot = 0.0;
  double scale = 1.0;
  Point2 target_centroid;
};

/// Eigenvalue gap below which the axes are treated as isotropic and the
/// major axis falls back to (1, 0).
inline constexpr double kIsotropicGap = 1e-9;

/// Tightest box around the foreground. Throws EmptyMask.
BBox mask_bbox(const Mask& mask);

/// Mean foreground coordinate. Throws EmptyMask.
Point2 mask_centroid(const Mask& mask);

/// PCA of foreground integer coordinates (unweighted, divide-by-N covariance).
/// Throws EmptyMask with no foreground and DegenerateMask with a single pixel.
PrincipalAxes compute_pca(const Mask& mask);

/// Wraps an angle modulo pi into (-pi/2, pi/2].
double wrap_half_turn(double angle);

/// Smallest signed rotation that makes the real major axis parallel (up to
/// sign) to the sim major axis. Result lies in (-pi/2, pi/2].
double rotation_angle(const PrincipalAxes& real, const PrincipalAxes& sim);
double rotation_angle(double real_angle, double sim_angle);

/// max(sim_w / real_w, sim_h / real_h).
double scale_factor(const BBox& sim_box, const BBox& real_box);

inline constexpr double kPi = std::numbers::pi;

inline double degrees(double radians) { return radians * 180.0 / kPi; }
inline double radians(double degrees) { return degrees * kPi / 180.0; }

}  // namespace simpaste
