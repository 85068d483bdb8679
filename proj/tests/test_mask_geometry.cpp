#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "simpaste/mask_geometry.hpp"

using namespace simpaste;

namespace {

Mask filled(int w, int h, int x0, int y0, int x1, int y1) {
  Mask m(w, h);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) m.set(x, y);
  return m;
}

}  // namespace

TEST_CASE("mask_bbox on single pixel and filled rectangle") {
  Mask m(5, 5);
  m.set(2, 3);
  CHECK(mask_bbox(m) == BBox{2, 3, 1, 1});

  // rows 2..4, cols 1..7
  CHECK(mask_bbox(filled(10, 10, 1, 2, 7, 4)) == BBox{1, 2, 7, 3});
}

TEST_CASE("mask_bbox throws on empty mask") {
  CHECK_THROWS_AS(mask_bbox(Mask(4, 4)), EmptyMask);
}

TEST_CASE("mask_bbox matches exhaustive scan and is tight") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Mask m = oracle::random_noise_mask(rng, 32, 32, rng.uniform(0.001, 0.05));
    if (!m.any()) continue;
    const BBox b = mask_bbox(m);
    REQUIRE(b == oracle::bbox_scan(m));
    // Every side touches a foreground pixel.
    bool left = false, right = false, top = false, bottom = false;
    for (int y = b.y_min; y <= b.y_max(); ++y) {
      left |= m.at(b.x_min, y);
      right |= m.at(b.x_max(), y);
    }
    for (int x = b.x_min; x <= b.x_max(); ++x) {
      top |= m.at(x, b.y_min);
      bottom |= m.at(x, b.y_max());
    }
    REQUIRE((left && right && top && bottom));
  }
}

TEST_CASE("compute_pca on axis-aligned strips") {
  Mask h(12, 12);
  for (int x = 0; x <= 9; ++x) h.set(x, 5);
  const PrincipalAxes a = compute_pca(h);
  CHECK(a.major.x == doctest::Approx(1.0));
  CHECK(a.major.y == doctest::Approx(0.0));
  CHECK(a.angle() == doctest::Approx(0.0));
  CHECK(a.variance_minor == 0.0);

  const PrincipalAxes v = compute_pca(rotate90(h, 1));
  CHECK(v.angle() == doctest::Approx(kPi / 2));
  CHECK(v.major.y == doctest::Approx(1.0));
}

TEST_CASE("compute_pca of 7x3 rectangle gives discrete-uniform variances") {
  // Var of 0..n-1 uniform = (n^2 - 1) / 12: 4 for n = 7, 2/3 for n = 3.
  const PrincipalAxes a = compute_pca(filled(10, 10, 2, 4, 8, 6));
  CHECK(a.covariance.xx == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(a.covariance.yy == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(a.covariance.xy == 0.0);
  CHECK(a.variance_major == doctest::Approx(4.0));
  CHECK(a.variance_minor == doctest::Approx(2.0 / 3.0));
  CHECK(a.major == Point2{1.0, 0.0});
  CHECK(a.centroid == Point2{5.0, 5.0});
}

TEST_CASE("compute_pca errors and isotropic tie-break") {
  CHECK_THROWS_AS(compute_pca(Mask(3, 3)), EmptyMask);
  Mask one(3, 3);
  one.set(1, 1);
  CHECK_THROWS_AS(compute_pca(one), DegenerateMask);

  const PrincipalAxes sq = compute_pca(filled(9, 9, 2, 2, 6, 6));
  CHECK(sq.major == Point2{1.0, 0.0});
  CHECK(sq.minor == Point2{0.0, 1.0});
}

TEST_CASE("PrincipalAxes invariants on random blobs") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const Mask m = oracle::random_blob(rng, 40, 30);
    if (m.count() < 2) continue;
    const PrincipalAxes a = compute_pca(m);
    CHECK(std::hypot(a.major.x, a.major.y) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::hypot(a.minor.x, a.minor.y) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::fabs(a.major.x * a.minor.x + a.major.y * a.minor.y) < 1e-9);
    CHECK(a.variance_major >= a.variance_minor);
    CHECK(a.angle() > -kPi / 2);
    CHECK(a.angle() <= kPi / 2);
  }
}

TEST_CASE("PCA is translation invariant") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const Mask m = oracle::random_blob(rng, 30, 30);
    if (m.count() < 2) continue;
    const int dx = rng.uniform_int(1, 20), dy = rng.uniform_int(1, 20);
    Mask shifted(60, 60);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 30; ++x)
        if (m.at(x, y)) shifted.set(x + dx, y + dy);
    const PrincipalAxes a = compute_pca(m), b = compute_pca(shifted);
    CHECK(b.covariance == a.covariance);
    CHECK(b.major == a.major);
    CHECK(b.minor == a.minor);
    CHECK(b.variance_major == a.variance_major);
    CHECK(b.variance_minor == a.variance_minor);
    CHECK(b.centroid.x - a.centroid.x == doctest::Approx(dx).epsilon(1e-12));
    CHECK(b.centroid.y - a.centroid.y == doctest::Approx(dy).epsilon(1e-12));
  }
}

TEST_CASE("PCA angle is equivariant under quarter turns") {
  Rng rng(21);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    const Mask m = oracle::random_blob(rng, 36, 28);
    if (m.count() < 2) continue;
    const PrincipalAxes a = compute_pca(m);
    if (a.variance_major - a.variance_minor < 1e-6) continue;
    for (int k = 1; k < 4; ++k) {
      const PrincipalAxes r = compute_pca(rotate90(m, k));
      CHECK(std::fabs(wrap_half_turn(r.angle() - (a.angle() + k * kPi / 2))) < 1e-6);
    }
    ++checked;
  }
  CHECK(checked > 90);
}

TEST_CASE("rotation_angle examples") {
  CHECK(rotation_angle(0.0, 0.0) == 0.0);
  CHECK(rotation_angle(0.0, kPi / 2) == doctest::Approx(kPi / 2));
  CHECK(rotation_angle(0.0, -kPi / 2) == doctest::Approx(kPi / 2));  // canonical +pi/2

  // 80 deg vs -80 deg: brute-force search over (-90, 90] at 0.1 deg steps.
  const double real = radians(80), sim = radians(-80);
  double best_delta = 0, best_err = 1e9;
  for (int i = -899; i <= 900; ++i) {
    const double d = radians(i * 0.1);
    const double err = oracle::axis_misalignment(real + d, sim);
    if (err < best_err - 1e-12) {
      best_err = err;
      best_delta = d;
    }
  }
  CHECK(degrees(best_delta) == doctest::Approx(20.0));
  CHECK(degrees(rotation_angle(real, sim)) == doctest::Approx(degrees(best_delta)).epsilon(1e-9));
}

TEST_CASE("rotation_angle properties") {
  Rng rng(3);
  for (int t = 0; t < 2000; ++t) {
    const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10);
    const double d = rotation_angle(a, b);
    CHECK(d > -kPi / 2);
    CHECK(d <= kPi / 2);
    CHECK(oracle::axis_misalignment(a + d, b) < 1e-9);
    CHECK(rotation_angle(a, a) == 0.0);
  }
}

TEST_CASE("rotation_angle on PrincipalAxes uses major axes") {
  Mask h(20, 20), d(20, 20);
  for (int i = 0; i < 10; ++i) {
    h.set(i, 3);
    d.set(i + 2, i + 2);
  }
  CHECK(degrees(rotation_angle(compute_pca(h), compute_pca(d))) == doctest::Approx(45.0));
  CHECK(degrees(rotation_angle(compute_pca(d), compute_pca(h))) == doctest::Approx(-45.0));
}

TEST_CASE("scale_factor examples") {
  CHECK(scale_factor({0, 0, 100, 200}, {0, 0, 50, 50}) == 4.0);
  CHECK(scale_factor({3, 4, 17, 9}, {0, 0, 17, 9}) == 1.0);
  CHECK(scale_factor({0, 0, 30, 40}, {0, 0, 60, 20}) == 2.0);
}

TEST_CASE("scale_factor product is at least one, equal iff aspect ratios match") {
  Rng rng(9);
  for (int t = 0; t < 1000; ++t) {
    const BBox s{0, 0, rng.uniform_int(1, 60), rng.uniform_int(1, 60)};
    const BBox r{0, 0, rng.uniform_int(1, 60), rng.uniform_int(1, 60)};
    const double p = scale_factor(s, r) * scale_factor(r, s);
    CHECK(p >= 1.0 - 1e-12);
    const bool same_aspect = s.width * r.height == s.height * r.width;
    CHECK((std::fabs(p - 1.0) < 1e-12) == same_aspect);
  }
}
