#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "simpaste/errors.hpp"

namespace simpaste {

/// Row-major boolean raster. One byte per pixel, 0 or 1.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height) : width_(width), height_(height), bits_(checked_size(width, height), 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty_raster() const { return bits_.empty(); }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }

  /// Out-of-range reads return false.
  bool get_or_false(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_ && at(x, y);
  }

  std::size_t count() const;
  bool any() const;

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  bool operator==(const Mask&) const = default;

 private:
  static std::size_t checked_size(int w, int h) {
    if (w < 0 || h < 0) throw ShapeMismatch("negative raster dimensions");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

using Rgb = std::array<std::uint8_t, 3>;

/// Interleaved 8-bit RGB raster.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {0, 0, 0});

  int width() const { return width_; }
  int height() const { return height_; }

  Rgb at(int x, int y) const {
    const std::size_t i = index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = index(x, y);
    data_[i] = c[0];
    data_[i + 1] = c[1];
    data_[i + 2] = c[2];
  }

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  bool operator==(const RgbImage&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x));
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// 16-bit instance-id raster; 0 is background.
class IdMap {
 public:
  IdMap() = default;
  IdMap(int width, int height) : width_(width), height_(height), ids_(static_cast<std::size_t>(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint16_t at(int x, int y) const { return ids_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int x, int y, std::uint16_t id) { ids_[static_cast<std::size_t>(y) * width_ + x] = id; }

  const std::vector<std::uint16_t>& ids() const { return ids_; }
  std::vector<std::uint16_t>& ids() { return ids_; }

  bool operator==(const IdMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint16_t> ids_;
};

/// Pixel-wise AND of two same-sized masks.
Mask mask_and(const Mask& a, const Mask& b);
/// Pixel-wise OR of two same-sized masks.
Mask mask_or(const Mask& a, const Mask& b);
/// Exact quarter-turn rotation. Each turn adds +90 degrees to the
/// image-coordinate angle atan2(dy, dx) of every displacement (x right,
/// y down, so a positive turn is clockwise on screen). Pixel (x, y) moves to
/// (h - 1 - y, x).
Mask rotate90(const Mask& m, int quarter_turns);

}  // namespace simpaste
