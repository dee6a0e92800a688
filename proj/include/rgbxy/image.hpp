#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rgbxy/color.hpp"
#include "rgbxy/error.hpp"

namespace rgbxy {

/// Row-major RGB image with channels in [0,1].
class Image {
 public:
  Image() = default;
  Image(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const { return pixel_count() == 0; }

  Rgb pixel(std::size_t i) const {
    return {data_[3 * i], data_[3 * i + 1], data_[3 * i + 2]};
  }
  Rgb at(int x, int y) const { return pixel(index(x, y)); }
  void set(std::size_t i, const Rgb& c) {
    data_[3 * i] = c.r;
    data_[3 * i + 1] = c.g;
    data_[3 * i + 2] = c.b;
  }
  void set(int x, int y, const Rgb& c) { set(index(x, y), c); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// 8-bit RGBA raster, used for layer export.
struct Rgba8Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;
};

/// Euclidean RGB distance RMSE over pixels.
double rmse(const Image& a, const Image& b);

/// Rounds to 8 bits per channel, as a PNG round trip would.
Image quantize8(const Image& img);

/// Box-filter downscale so that the long edge is at most `max_edge`.
Image downscale(const Image& img, int max_edge);

// PNG/JPEG codecs. Decoding ignores alpha; 16-bit PNGs keep full precision.
Image read_image(const std::filesystem::path& path);
Image decode_png(std::span<const std::uint8_t> bytes);
Rgba8Image decode_png_rgba(std::span<const std::uint8_t> bytes);
/// `fast` trades file size for encode time (zlib level 1); used for previews.
enum class PngCompression { standard, fast };
std::vector<std::uint8_t> encode_png(const Image& img, PngCompression c = PngCompression::standard);
std::vector<std::uint8_t> encode_png(const Rgba8Image& img, PngCompression c = PngCompression::standard);

/// Writes via a temporary file and rename, so readers never see a partial
/// file.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& text);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const Image& img);
void write_png(const std::filesystem::path& path, const Rgba8Image& img);

}  // namespace rgbxy
