#pragma once

// Test-only reference implementations. They deliberately avoid the library
// code paths they check: brute-force scans, two-pass summation, exhaustive
// enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "simpaste/eval.hpp"
#include "simpaste/image.hpp"
#include "simpaste/mask_geometry.hpp"
#include "simpaste/rng.hpp"

namespace oracle {

using simpaste::BBox;
using simpaste::Mask;

inline BBox bbox_scan(const Mask& m) {
  int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.bits()[static_cast<std::size_t>(y) * m.width() + x]) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

struct Cov {
  double mx, my, xx, xy, yy;
};

/// Two-pass double-loop covariance (divide by N).
inline Cov covariance_two_pass(const Mask& m) {
  double sx = 0, sy = 0, n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.at(x, y)) {
        sx += x;
        sy += y;
        n += 1;
      }
  Cov c{sx / n, sy / n, 0, 0, 0};
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.at(x, y)) {
        c.xx += (x - c.mx) * (x - c.mx);
        c.xy += (x - c.mx) * (y - c.my);
        c.yy += (y - c.my) * (y - c.my);
      }
  c.xx /= n;
  c.xy /= n;
  c.yy /= n;
  return c;
}

/// Random blob: union of a few random filled ellipses.
inline Mask random_blob(simpaste::Rng& rng, int w, int h, int blobs = 3) {
  Mask m(w, h);
  for (int b = 0; b < blobs; ++b) {
    const double cx = rng.uniform(0.2 * w, 0.8 * w);
    const double cy = rng.uniform(0.2 * h, 0.8 * h);
    const double a = rng.uniform(1.5, 0.35 * w);
    const double bb = rng.uniform(1.0, 0.2 * h);
    const double phi = rng.uniform(-3.2, 3.2);
    const double c = std::cos(phi), s = std::sin(phi);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double u = (c * (x - cx) + s * (y - cy)) / a;
        const double v = (-s * (x - cx) + c * (y - cy)) / bb;
        if (u * u + v * v <= 1.0) m.set(x, y);
      }
  }
  if (!m.any()) m.set(w / 2, h / 2);
  return m;
}

inline Mask random_noise_mask(simpaste::Rng& rng, int w, int h, double p) {
  Mask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (rng.uniform01() < p) m.set(x, y);
  return m;
}

/// Misalignment between two undirected axes, in [0, pi/2], via acos|cos|.
inline double axis_misalignment(double a, double b) {
  return std::acos(std::min(1.0, std::fabs(std::cos(a - b))));
}

/// Nearest-neighbour warp: output pixel q takes input pixel
/// round(c + R(-theta)(q - t) / s). Independent of the compositor sampler.
inline Mask warp_mask(const Mask& in, double theta, double scale, double cx, double cy, double tx, double ty, int ow,
                      int oh) {
  Mask out(ow, oh);
  const double c = std::cos(theta), s = std::sin(theta);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      const double dx = (x - tx) / scale, dy = (y - ty) / scale;
      const double px = cx + c * dx + s * dy;
      const double py = cy - s * dx + c * dy;
      const int ix = static_cast<int>(std::lround(px));
      const int iy = static_cast<int>(std::lround(py));
      if (ix >= 0 && iy >= 0 && ix < in.width() && iy < in.height() && in.at(ix, iy)) out.set(x, y);
    }
  return out;
}

// ----------------------------------------------------------------- eval --

inline double box_iou(const simpaste::eval::Box& a, const simpaste::eval::Box& b) {
  const double x0 = std::max(a.x, b.x), y0 = std::max(a.y, b.y);
  const double x1 = std::min(a.x + a.w, b.x + b.w), y1 = std::min(a.y + a.h, b.y + b.h);
  const double inter = (x1 > x0 && y1 > y0) ? (x1 - x0) * (y1 - y0) : 0.0;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

/// Greedy rule re-implemented by selection: repeatedly take the remaining
/// prediction with the highest confidence (lowest index on ties), then the
/// unmatched GT with the highest IoU (lowest index on ties) if >= thresh.
inline std::vector<bool> greedy_tp_flags(const std::vector<simpaste::eval::Detection>& preds,
                                         const std::vector<simpaste::eval::Box>& gts, double thresh) {
  std::vector<bool> tp(preds.size(), false), used(preds.size(), false), taken(gts.size(), false);
  for (std::size_t round = 0; round < preds.size(); ++round) {
    std::size_t best = preds.size();
    for (std::size_t i = 0; i < preds.size(); ++i)
      if (!used[i] && (best == preds.size() || preds[i].confidence > preds[best].confidence)) best = i;
    used[best] = true;
    std::size_t g_best = gts.size();
    double v_best = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = box_iou(preds[best].box, gts[g]);
      if (v >= thresh && v > v_best) {
        v_best = v;
        g_best = g;
      }
    }
    if (g_best < gts.size()) {
      taken[g_best] = true;
      tp[best] = true;
    }
  }
  return tp;
}

/// Integrates the interpolated PR step function p(r) = max{p_j : r_j >= r}
/// over each interval between distinct recall levels.
inline double ap_brute_force(const std::vector<simpaste::eval::Detection>& preds,
                             const std::vector<simpaste::eval::Box>& gts, double thresh) {
  if (gts.empty() || preds.empty()) return 0.0;
  const auto tp = greedy_tp_flags(preds, gts, thresh);
  std::vector<std::size_t> order(preds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].confidence > preds[b].confidence; });
  std::vector<std::pair<double, double>> pts;  // (recall, precision)
  double ctp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (tp[order[k]]) ctp += 1;
    pts.emplace_back(ctp / gts.size(), ctp / (k + 1));
  }
  std::set<double> levels;
  for (const auto& p : pts) levels.insert(p.first);
  double area = 0, prev = 0;
  for (double r : levels) {
    if (r <= 0) continue;
    double best = 0;
    for (const auto& p : pts)
      if (p.first >= r) best = std::max(best, p.second);
    area += (r - prev) * best;
    prev = r;
  }
  return area;
}

// Boxes on a coarse grid so that exact IoU ties and heavy overlaps occur;
// confidences are quantized to force rank ties.
struct DetectionCase {
  std::vector<simpaste::eval::Detection> preds;
  std::vector<simpaste::eval::Box> gts;
};

inline DetectionCase random_detection_case(simpaste::Rng& rng, int max_preds, int max_gts) {
  DetectionCase c;
  const int ng = static_cast<int>(rng.uniform_below(max_gts + 1));
  const int np = static_cast<int>(rng.uniform_below(max_preds + 1));
  for (int g = 0; g < ng; ++g)
    c.gts.push_back({double(rng.uniform_below(8)), double(rng.uniform_below(8)), 2.0 + rng.uniform_below(4),
                     2.0 + rng.uniform_below(4)});
  for (int p = 0; p < np; ++p) {
    simpaste::eval::Box b;
    if (!c.gts.empty() && rng.uniform01() < 0.6) {
      b = c.gts[rng.uniform_below(c.gts.size())];
      b.x += rng.uniform(-1.0, 1.0);
      b.y += rng.uniform(-1.0, 1.0);
    } else {
      b = {double(rng.uniform_below(8)), double(rng.uniform_below(8)), 2.0 + rng.uniform_below(4),
           2.0 + rng.uniform_below(4)};
    }
    c.preds.push_back({0, b, 0.1 * (1 + rng.uniform_below(10))});
  }
  return c;
}

}  // namespace oracle
