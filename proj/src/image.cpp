#include "rgbxy/image.hpp"

#include <png.h>
#include <stdio.h>

#include <jpeglib.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <fstream>
#include <iterator>

namespace rgbxy {

Image::Image(int width, int height)
    : width_(width),
      height_(height),
      data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3, 0.0) {
  if (width < 0 || height < 0) throw Error("negative image dimensions");
}

double rmse(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error("rmse: image dimensions differ");
  }
  if (a.empty()) return 0.0;
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.pixel_count()));
}

Image quantize8(const Image& img) {
  Image out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = std::round(std::clamp(src[i], 0.0, 1.0) * 255.0) / 255.0;
  }
  return out;
}

Image downscale(const Image& img, int max_edge) {
  const int long_edge = std::max(img.width(), img.height());
  if (long_edge <= max_edge || max_edge <= 0) return img;
  const double s = static_cast<double>(max_edge) / long_edge;
  const int w = std::max(1, static_cast<int>(std::lround(img.width() * s)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() * s)));
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = y * img.height() / h;
    const int y1 = std::max(y0 + 1, (y + 1) * img.height() / h);
    for (int x = 0; x < w; ++x) {
      const int x0 = x * img.width() / w;
      const int x1 = std::max(x0 + 1, (x + 1) * img.width() / w);
      Rgb acc{};
      for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) {
          const Rgb c = img.at(xx, yy);
          acc.r += c.r;
          acc.g += c.g;
          acc.b += c.b;
        }
      }
      const double n = static_cast<double>((y1 - y0) * (x1 - x0));
      out.set(x, y, {acc.r / n, acc.g / n, acc.b / n});
    }
  }
  return out;
}

namespace {

Image from_rgb8(const std::uint8_t* px, int width, int height) {
  Image img(width, height);
  auto dst = img.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = px[i] / 255.0;
  return img;
}

Image decode_jpeg(std::span<const std::uint8_t> bytes) {
  struct ErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
  };
  jpeg_decompress_struct cinfo{};
  ErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = [](j_common_ptr info) {
    std::longjmp(reinterpret_cast<ErrorManager*>(info->err)->jump, 1);
  };
  std::vector<std::uint8_t> pixels;
  int width = 0;
  int height = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw FormatError("invalid JPEG data");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  pixels.resize(static_cast<std::size_t>(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_rgb8(pixels.data(), width, height);
}

std::vector<std::uint8_t> encode_png_raw(const std::uint8_t* px, int width,
                                         int height, png_uint_32 format) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  // One pass into a buffer sized for the worst case.
  png_alloc_size_t size = PNG_IMAGE_PNG_SIZE_MAX(image);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, px, 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void append_png_bytes(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

std::vector<std::uint8_t> encode_png_fast(const std::uint8_t* px, int width, int height, int channels) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("PNG encode failed: out of memory");
  png_infop info = png_create_info_struct(png);
  std::vector<std::uint8_t> out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG encode failed");
  }
  png_set_write_fn(png, &out, append_png_bytes, nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 1);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(px + static_cast<std::size_t>(y) * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("invalid PNG data: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  // Alpha is composited over black by the simplified API; callers are
  // expected to feed opaque images.
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError(std::string("PNG decode failed: ") + image.message);
  }
  return from_rgb8(pixels.data(), static_cast<int>(image.width),
                   static_cast<int>(image.height));
}

Rgba8Image decode_png_rgba(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("invalid PNG data: ") + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  Rgba8Image out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.data.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError(std::string("PNG decode failed: ") + image.message);
  }
  return out;
}

Image read_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
    return decode_jpeg(bytes);
  }
  throw FormatError("unsupported image format: " + path.string());
}

std::vector<std::uint8_t> encode_png(const Image& img, PngCompression c) {
  std::vector<std::uint8_t> px(img.pixel_count() * 3);
  auto src = img.data();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = static_cast<std::uint8_t>(
        std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0));
  }
  if (c == PngCompression::fast) return encode_png_fast(px.data(), img.width(), img.height(), 3);
  return encode_png_raw(px.data(), img.width(), img.height(), PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_png(const Rgba8Image& img, PngCompression c) {
  if (c == PngCompression::fast) return encode_png_fast(img.data.data(), img.width, img.height, 4);
  return encode_png_raw(img.data.data(), img.width, img.height,
                        PNG_FORMAT_RGBA);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

void write_png(const std::filesystem::path& path, const Image& img) {
  write_file_atomic(path, encode_png(img));
}

void write_png(const std::filesystem::path& path, const Rgba8Image& img) {
  write_file_atomic(path, encode_png(img));
}

}  // namespace rgbxy
