#pragma once

#include "proxykit/errors.hpp"
#include "proxykit/semantics.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace proxykit {

/// Row-major, interleaved-channel image.
template <class T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels),
        data_(static_cast<std::size_t>(width) * height * channels, fill) {
    if (width < 0 || height < 0 || channels < 1) throw DimensionError("invalid image dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
  T* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_ * channels_; }
  const T* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_ * channels_; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool same_shape(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }
  template <class U>
  bool same_size(const Image<U>& o) const {
    return width_ == o.width() && height_ == o.height();
  }

  bool operator==(const Image& o) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using ImageD = Image<double>;
using SemanticImage = Image<SemanticId>;
using InstanceImage = Image<std::uint32_t>;
using ImageU8 = Image<std::uint8_t>;

/// Portable float map (32-bit, little-endian), 1 or 3 channels; rows are
/// stored bottom-to-top per the format. Infinite values are written as +inf.
void write_pfm(const ImageD& img, const std::filesystem::path& path);
ImageD read_pfm(const std::filesystem::path& path);

/// 8-bit RGB (3 channels) or gray (1 channel) PNG.
void write_png(const ImageU8& img, const std::filesystem::path& path);
/// Paletted PNG whose palette indices are the semantic ids.
void write_semantic_png(const SemanticImage& img, const std::filesystem::path& path);
SemanticImage read_semantic_png(const std::filesystem::path& path);

/// Maps finite depth linearly to 8-bit gray over [0, max_depth]; no-hit is black.
ImageU8 depth_preview(const ImageD& depth, double max_depth);

}  // namespace proxykit
