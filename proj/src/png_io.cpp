#include "simpaste/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>

namespace simpaste::png {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const std::filesystem::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

void on_png_error(png_structp ptr, png_const_charp) { std::longjmp(png_jmpbuf(ptr), 1); }
void on_png_warning(png_structp, png_const_charp) {}

// Writes `height` rows of `row_bytes` each, produced by `fill_row`.
template <typename FillRow>
void write_png(const std::filesystem::path& path, int width, int height, int color_type, int bit_depth,
               std::size_t row_bytes, FillRow fill_row) {
  File file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_byte> row(row_bytes);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode " + path.string());
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    fill_row(y, row.data());
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Raster read(const std::filesystem::path& path) {
  File file = open_file(path, "rb");
  png_byte header[8];
  if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
    throw IoError("not a PNG file: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  Raster out;
  std::vector<png_byte> row;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // host little-endian 16-bit samples
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  bit_depth = png_get_bit_depth(png, info);
  out.bit_depth = bit_depth;
  row.resize(png_get_rowbytes(png, info));
  out.samples.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);

  std::size_t k = 0;
  for (int y = 0; y < out.height; ++y) {
    png_read_row(png, row.data(), nullptr);
    const std::size_t n = static_cast<std::size_t>(out.width) * out.channels;
    for (std::size_t i = 0; i < n; ++i) {
      if (bit_depth == 16) {
        out.samples[k++] = static_cast<std::uint16_t>(row[2 * i] | (row[2 * i + 1] << 8));
      } else {
        out.samples[k++] = row[i];
      }
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

RgbImage read_rgb(const std::filesystem::path& path) {
  const Raster r = read(path);
  RgbImage img(r.width, r.height);
  const int shift = r.bit_depth == 16 ? 8 : 0;
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * r.width + x) * r.channels;
      if (r.channels >= 3) {
        img.set(x, y,
                {static_cast<std::uint8_t>(r.samples[i] >> shift), static_cast<std::uint8_t>(r.samples[i + 1] >> shift),
                 static_cast<std::uint8_t>(r.samples[i + 2] >> shift)});
      } else {
        const auto g = static_cast<std::uint8_t>(r.samples[i] >> shift);
        img.set(x, y, {g, g, g});
      }
    }
  }
  return img;
}

Mask read_mask(const std::filesystem::path& path) {
  const Raster r = read(path);
  Mask m(r.width, r.height);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * r.width + x) * r.channels;
      for (int c = 0; c < r.channels; ++c) {
        if (r.samples[i + c] > 0) {
          m.set(x, y);
          break;
        }
      }
    }
  }
  return m;
}

IdMap read_id_map(const std::filesystem::path& path) {
  const Raster r = read(path);
  if (r.channels != 1) throw EncodingError("id-indexed instance map must be single-channel: " + path.string());
  IdMap map(r.width, r.height);
  map.ids().assign(r.samples.begin(), r.samples.end());
  return map;
}

void write_rgb(const std::filesystem::path& path, const RgbImage& image) {
  const std::size_t stride = 3 * static_cast<std::size_t>(image.width());
  write_png(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, stride, [&](int y, png_byte* row) {
    std::copy_n(image.data().data() + stride * y, stride, row);
  });
}

void write_mask(const std::filesystem::path& path, const Mask& mask) {
  write_png(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 8, static_cast<std::size_t>(mask.width()),
            [&](int y, png_byte* row) {
              for (int x = 0; x < mask.width(); ++x) row[x] = mask.at(x, y) ? 255 : 0;
            });
}

void write_id_map(const std::filesystem::path& path, const IdMap& map) {
  write_png(path, map.width(), map.height(), PNG_COLOR_TYPE_GRAY, 16, 2 * static_cast<std::size_t>(map.width()),
            [&](int y, png_byte* row) {
              for (int x = 0; x < map.width(); ++x) {
                const std::uint16_t v = map.at(x, y);
                row[2 * x] = static_cast<png_byte>(v >> 8);  // PNG is big-endian
                row[2 * x + 1] = static_cast<png_byte>(v & 0xFF);
              }
            });
}

}  // namespace simpaste::png
