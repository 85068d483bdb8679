#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "simpaste/image.hpp"

namespace simpaste::png {

/// Decoded PNG in its native channel layout (1 or 3 channels, 8 or 16 bit).
/// Palette and alpha are expanded/stripped on read.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;  // row-major, interleaved
};

Raster read(const std::filesystem::path& path);

/// Any PNG converted to 8-bit RGB (gray is replicated, 16-bit is scaled).
RgbImage read_rgb(const std::filesystem::path& path);
/// Any PNG reduced to a mask: a pixel is foreground when any sample > 0.
Mask read_mask(const std::filesystem::path& path);
/// Single-channel PNG read as instance ids.
IdMap read_id_map(const std::filesystem::path& path);

void write_rgb(const std::filesystem::path& path, const RgbImage& image);
/// Foreground written as 255, background as 0.
void write_mask(const std::filesystem::path& path, const Mask& mask);
void write_id_map(const std::filesystem::path& path, const IdMap& map);

}  // namespace simpaste::png
