#include "simpaste/mask_geometry.hpp"

#include <cmath>
#include <limits>

namespace simpaste {

namespace {

using Wide = __int128;

// Raw moments in exact integer arithmetic. Central moments formed as
// N*sum(x^2) - sum(x)^2 are then translation invariant bit-for-bit.
struct Moments {
  long long n = 0;
  Wide sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
};

Moments accumulate(const Mask& mask) {
  Moments m;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      ++m.n;
      m.sx += x;
      m.sy += y;
      m.sxx += static_cast<Wide>(x) * x;
      m.sxy += static_cast<Wide>(x) * y;
      m.syy += static_cast<Wide>(y) * y;
    }
  }
  return m;
}

Point2 canonical(Point2 v) {
  const double a = std::atan2(v.y, v.x);
  if (a > kPi / 2 || a <= -kPi / 2) return {-v.x, -v.y};
  return v;
}

}  // namespace

double PrincipalAxes::angle() const { return std::atan2(major.y, major.x); }

double PrincipalAxes::elongation() const {
  if (variance_minor <= 0.0) return std::numeric_limits<double>::infinity();
  return variance_major / variance_minor;
}

bool PrincipalAxes::isotropic() const { return variance_major - variance_minor < kIsotropicGap; }

BBox mask_bbox(const Mask& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      if (x < x0) x0 = x;
      if (x > x1) x1 = x;
      if (y < y0) y0 = y;
      if (y > y1) y1 = y;
    }
  }
  if (x1 < 0) throw EmptyMask("mask has no foreground pixel");
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

Point2 mask_centroid(const Mask& mask) {
  const Moments m = accumulate(mask);
  if (m.n == 0) throw EmptyMask("mask has no foreground pixel");
  return {static_cast<double>(m.sx) / static_cast<double>(m.n), static_cast<double>(m.sy) / static_cast<double>(m.n)};
}

PrincipalAxes compute_pca(const Mask& mask) {
  const Moments m = accumulate(mask);
  if (m.n == 0) throw EmptyMask("mask has no foreground pixel");
  if (m.n < 2) throw DegenerateMask("PCA needs at least 2 foreground pixels");

  const Wide n = m.n;
  const double n2 = static_cast<double>(m.n) * static_cast<double>(m.n);
  PrincipalAxes axes;
  axes.pixel_count = m.n;
  axes.centroid = {static_cast<double>(m.sx) / static_cast<double>(m.n),
                   static_cast<double>(m.sy) / static_cast<double>(m.n)};
  axes.covariance.xx = static_cast<double>(n * m.sxx - m.sx * m.sx) / n2;
  axes.covariance.xy = static_cast<double>(n * m.sxy - m.sx * m.sy) / n2;
  axes.covariance.yy = static_cast<double>(n * m.syy - m.sy * m.sy) / n2;

  const double a = axes.covariance.xx;
  const double b = axes.covariance.xy;
  const double c = axes.covariance.yy;
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  axes.variance_major = mean + radius;
  axes.variance_minor = std::max(0.0, mean - radius);

  if (axes.isotropic()) {
    axes.major = {1.0, 0.0};
  } else {
    // Eigenvector for the larger eigenvalue; pick the better conditioned of
    // the two algebraically equivalent forms.
    Point2 v = (a >= c) ? Point2{axes.variance_major - c, b} : Point2{b, axes.variance_major - a};
    const double norm = std::hypot(v.x, v.y);
    axes.major = canonical({v.x / norm, v.y / norm});
  }
  axes.minor = {-axes.major.y, axes.major.x};
  return axes;
}

double wrap_half_turn(double angle) {
  double r = std::fmod(angle, kPi);  // (-pi, pi)
  if (r > kPi / 2) r -= kPi;
  if (r <= -kPi / 2) r += kPi;
  return r;
}

double rotation_angle(double real_angle, double sim_angle) {
  return wrap_half_turn(sim_angle - real_angle);
}

double rotation_angle(const PrincipalAxes& real, const PrincipalAxes& sim) {
  return rotation_angle(real.angle(), sim.angle());
}

double scale_factor(const BBox& sim_box, const BBox& real_box) {
  const double fw = static_cast<double>(sim_box.width) / real_box.width;
  const double fh = static_cast<double>(sim_box.height) / real_box.height;
  return std::max(fw, fh);
}

}  // namespace simpaste
