#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgbxy/color.hpp"
#include "rgbxy/geom/hull.hpp"
#include "rgbxy/image.hpp"

namespace rgbxy {

struct Palette {
  std::vector<Rgb> colors;

  std::size_t size() const { return colors.size(); }
  friend bool operator==(const Palette&, const Palette&) = default;
};

inline constexpr int kBinsPerAxis = 32;
inline constexpr int kBinCount = kBinsPerAxis * kBinsPerAxis * kBinsPerAxis;

struct HistogramBin {
  int index = 0;  // (r * 32 + g) * 32 + b
  Rgb color;      // mean of the pixels that fell in the bin
  std::uint64_t count = 0;
};

/// Non-empty bins in index order.
struct BinnedHistogram {
  std::vector<HistogramBin> bins;
  std::uint64_t total() const;
};

/// Integer accumulators: counts and channel sums in 1/65535 units, so merges
/// are exact and independent of the order pixels are visited.
struct HistogramAccumulator {
  std::vector<std::uint64_t> count = std::vector<std::uint64_t>(kBinCount);
  std::vector<std::uint64_t> sum = std::vector<std::uint64_t>(3 * kBinCount);

  void add(const Rgb& c);
  void merge(const HistogramAccumulator& other);
  BinnedHistogram finish() const;
};

int bin_index(const Rgb& c);

BinnedHistogram bin_image(const Image& img);

/// sqrt(sum count * dist(bin, hull)^2 / sum count).
double binned_rmse(const BinnedHistogram& hist, const geom::HullMesh& hull);

struct PaletteOptions {
  double rmse_tol = 2.0 / 255.0;
  /// Error is measured only once the hull has at most this many vertices.
  std::size_t measure_below = 10;
};

struct PaletteReport {
  Palette palette;
  double rmse = 0.0;
  std::size_t initial_vertices = 0;
  std::size_t collapses = 0;
  bool degenerate = false;
};

/// Simplifies the hull of `colors` with the error stop rule measured against
/// `hist`. Colors may be any multiset; they are deduplicated and sorted.
PaletteReport palette_from_colors(std::vector<Rgb> colors, const BinnedHistogram& hist,
                                  const PaletteOptions& opts = {});

PaletteReport extract_palette_report(const Image& img, const PaletteOptions& opts = {});
Palette extract_palette(const Image& img, double rmse_tol = 2.0 / 255.0);

/// Distinct colors of an image, sorted.
std::vector<Rgb> unique_colors(const Image& img);

/// Vertices of the RGB hull of a color set (any rank), sorted.
std::vector<Rgb> hull_vertex_colors(std::vector<Rgb> colors);

/// Index of the color with the smallest Lab lightness; ties go to the lowest
/// index.
std::size_t darkest_index(const Palette& p);

/// Hull of the palette colors. Throws DegenerateInput if they are not full
/// rank.
geom::HullMesh palette_hull(const Palette& p);

std::string palette_to_json(const Palette& p);
Palette palette_from_json(const std::string& text);

}  // namespace rgbxy
