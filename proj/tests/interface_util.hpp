#pragma once

#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rgbxy/cli.hpp"
#include "rgbxy/image.hpp"

namespace testutil {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("rgbxy_" + tag + "_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;

  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

inline CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = rgbxy::cli_main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string slurp(const fs::path& p) {
  const auto bytes = rgbxy::read_file(p);
  return {bytes.begin(), bytes.end()};
}

/// Smooth image with red, green and blue regions over a dark background.
inline rgbxy::Image tricolor(int w, int h) {
  rgbxy::Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = static_cast<double>(x) / (w - 1);
      const double v = static_cast<double>(y) / (h - 1);
      rgbxy::Rgb c{0.1 + 0.7 * u * (1 - v), 0.1 + 0.6 * v * (1 - u), 0.15 + 0.6 * u * v};
      img.set(x, y, c);
    }
  }
  return rgbxy::quantize8(img);
}

}  // namespace testutil
