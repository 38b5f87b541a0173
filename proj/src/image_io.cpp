#include "proxykit/image.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace proxykit {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

}  // namespace

void write_pfm(const ImageD& img, const std::filesystem::path& path) {
  if (img.channels() != 1 && img.channels() != 3) throw DimensionError("PFM supports 1 or 3 channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << (img.channels() == 3 ? "PF" : "Pf") << "\n" << img.width() << " " << img.height() << "\n-1.0\n";
  std::vector<float> row(static_cast<std::size_t>(img.width()) * img.channels());
  for (int y = img.height() - 1; y >= 0; --y) {
    const double* src = img.row(y);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<float>(src[i]);
    if constexpr (std::endian::native == std::endian::big) {
      for (float& v : row) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        u = __builtin_bswap32(u);
        std::memcpy(&v, &u, 4);
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

ImageD read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  in.get();
  if ((magic != "PF" && magic != "Pf") || w <= 0 || h <= 0 || scale == 0.0)
    throw IoError("not a PFM file: " + path.string());
  const int ch = magic == "PF" ? 3 : 1;
  const bool little = scale < 0.0;
  ImageD img(w, h, ch);
  std::vector<float> row(static_cast<std::size_t>(w) * ch);
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw IoError("truncated PFM: " + path.string());
    const bool swap = little != (std::endian::native == std::endian::little);
    double* dst = img.row(y);
    for (std::size_t i = 0; i < row.size(); ++i) {
      float v = row[i];
      if (swap) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        u = __builtin_bswap32(u);
        std::memcpy(&v, &u, 4);
      }
      dst[i] = v;
    }
  }
  return img;
}

namespace {

void write_png_impl(const std::filesystem::path& path, int width, int height, int color_type,
                    const std::vector<png_color>* palette, const std::vector<const std::uint8_t*>& rows) {
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed: " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (palette) png_set_PLTE(png, info, palette->data(), static_cast<int>(palette->size()));
  png_write_info(png, info);
  for (const auto* r : rows) png_write_row(png, const_cast<png_bytep>(r));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png(const ImageU8& img, const std::filesystem::path& path) {
  if (img.channels() != 1 && img.channels() != 3) throw DimensionError("PNG writer supports 1 or 3 channels");
  std::vector<const std::uint8_t*> rows;
  for (int y = 0; y < img.height(); ++y) rows.push_back(img.row(y));
  write_png_impl(path, img.width(), img.height(), img.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 nullptr, rows);
}

void write_semantic_png(const SemanticImage& img, const std::filesystem::path& path) {
  std::vector<png_color> palette;
  for (int i = 0; i <= kNumSemanticClasses; ++i) {
    Rgb8 c = semantic_color(static_cast<SemanticId>(i));
    palette.push_back({c.r, c.g, c.b});
  }
  ImageU8 idx(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      SemanticId v = img.at(x, y);
      if (v > kNumSemanticClasses) throw DimensionError("semantic id out of palette range");
      idx.at(x, y) = static_cast<std::uint8_t>(v);
    }
  std::vector<const std::uint8_t*> rows;
  for (int y = 0; y < idx.height(); ++y) rows.push_back(idx.row(y));
  write_png_impl(path, img.width(), img.height(), PNG_COLOR_TYPE_PALETTE, &palette, rows);
}

SemanticImage read_semantic_png(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG decoding failed: " + path.string());
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if ((color != PNG_COLOR_TYPE_PALETTE && color != PNG_COLOR_TYPE_GRAY) || depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("semantic PNG must be 8-bit paletted or gray: " + path.string());
  }
  SemanticImage out(w, h);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < w; ++x) out.at(x, y) = row[x];
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

ImageU8 depth_preview(const ImageD& depth, double max_depth) {
  ImageU8 out(depth.width(), depth.height());
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x) {
      double d = depth.at(x, y);
      if (!std::isfinite(d)) continue;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(255.0 * (1.0 - d / max_depth), 1.0, 255.0));
    }
  return out;
}

}  // namespace proxykit
