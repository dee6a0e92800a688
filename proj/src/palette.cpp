#include "rgbxy/palette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "rgbxy/error.hpp"
#include "rgbxy/geom/distance.hpp"
#include "rgbxy/geom/simplify.hpp"
#include "rgbxy/kernels.hpp"

namespace rgbxy {

namespace {

constexpr double kFixedScale = 65535.0;
// Offset used to lift rank-deficient color sets to a full-rank simplex.
constexpr double kPadOffset = 1.0 / 255.0;

geom::PointSet to_points(const std::vector<Rgb>& colors) {
  geom::PointSet ps(3);
  ps.reserve(colors.size());
  for (const auto& c : colors) {
    const double p[3] = {c.r, c.g, c.b};
    ps.push_back(p);
  }
  return ps;
}

Rgb to_rgb(std::span<const double> p) { return {p[0], p[1], p[2]}; }

void sort_unique(std::vector<Rgb>& colors) {
  std::sort(colors.begin(), colors.end());
  colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
}

bool in_unit_cube(const Rgb& c) {
  return c.r >= 0.0 && c.r <= 1.0 && c.g >= 0.0 && c.g <= 1.0 && c.b >= 0.0 && c.b <= 1.0;
}

int color_rank(const std::vector<Rgb>& colors) {
  if (colors.empty()) return -1;
  return geom::AffineFrame::fit(to_points(colors)).rank();
}

// Adds points offset along coordinate axes until the set spans 3D. Each
// added point stays inside the cube.
std::vector<Rgb> pad_to_full_rank(std::vector<Rgb> colors) {
  int rank = color_rank(colors);
  const std::vector<Rgb> anchors = colors;
  for (const auto& anchor : anchors) {
    for (int sign : {1, -1}) {
      for (int axis = 0; axis < 3 && rank < 3; ++axis) {
        Rgb p = anchor;
        double* ch = axis == 0 ? &p.r : axis == 1 ? &p.g : &p.b;
        *ch += sign * kPadOffset;
        if (!in_unit_cube(p)) continue;
        colors.push_back(p);
        const int r = color_rank(colors);
        if (r > rank) {
          rank = r;
        } else {
          colors.pop_back();
        }
      }
    }
    if (rank == 3) break;
  }
  if (rank < 3) throw DegenerateInput("cannot pad color set to full rank", rank);
  sort_unique(colors);
  return colors;
}

// Clamps hull vertices into the cube and returns the vertices of their hull.
std::vector<Rgb> clamped_vertices(const geom::HullMesh& hull) {
  std::vector<Rgb> colors;
  colors.reserve(hull.vertex_count());
  for (std::size_t v = 0; v < hull.vertex_count(); ++v) {
    colors.push_back(clamp_unit(to_rgb(hull.vertices[v])));
  }
  colors = hull_vertex_colors(std::move(colors));
  if (color_rank(colors) < 3) colors = pad_to_full_rank(std::move(colors));
  return colors;
}

}  // namespace

std::uint64_t BinnedHistogram::total() const {
  std::uint64_t t = 0;
  for (const auto& b : bins) t += b.count;
  return t;
}

int bin_index(const Rgb& c) {
  auto axis = [](double v) {
    return std::clamp(static_cast<int>(std::floor(v * kBinsPerAxis)), 0, kBinsPerAxis - 1);
  };
  return (axis(c.r) * kBinsPerAxis + axis(c.g)) * kBinsPerAxis + axis(c.b);
}

void HistogramAccumulator::add(const Rgb& c) {
  const int i = bin_index(c);
  ++count[i];
  const Rgb k = clamp_unit(c);
  sum[3 * i] += static_cast<std::uint64_t>(std::llround(k.r * kFixedScale));
  sum[3 * i + 1] += static_cast<std::uint64_t>(std::llround(k.g * kFixedScale));
  sum[3 * i + 2] += static_cast<std::uint64_t>(std::llround(k.b * kFixedScale));
}

void HistogramAccumulator::merge(const HistogramAccumulator& other) {
  for (int i = 0; i < kBinCount; ++i) count[i] += other.count[i];
  for (int i = 0; i < 3 * kBinCount; ++i) sum[i] += other.sum[i];
}

BinnedHistogram HistogramAccumulator::finish() const {
  BinnedHistogram h;
  for (int i = 0; i < kBinCount; ++i) {
    if (count[i] == 0) continue;
    const double n = static_cast<double>(count[i]) * kFixedScale;
    h.bins.push_back({i,
                      {static_cast<double>(sum[3 * i]) / n, static_cast<double>(sum[3 * i + 1]) / n,
                       static_cast<double>(sum[3 * i + 2]) / n},
                      count[i]});
  }
  return h;
}

BinnedHistogram bin_image(const Image& img) { return kernels::bin_pixels_omp(img).finish(); }

double binned_rmse(const BinnedHistogram& hist, const geom::HullMesh& hull) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& b : hist.bins) {
    const double p[3] = {b.color.r, b.color.g, b.color.b};
    const double d = geom::distance_to_hull(hull, p).distance;
    num += static_cast<double>(b.count) * d * d;
    den += static_cast<double>(b.count);
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

std::vector<Rgb> unique_colors(const Image& img) {
  std::vector<Rgb> colors;
  colors.reserve(img.pixel_count());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) colors.push_back(img.pixel(i));
  sort_unique(colors);
  return colors;
}

std::vector<Rgb> hull_vertex_colors(std::vector<Rgb> colors) {
  sort_unique(colors);
  if (colors.size() <= 1) return colors;
  const geom::ReducedHull rh = geom::reduced_convex_hull(to_points(colors));
  std::vector<Rgb> out;
  for (std::size_t s : rh.vertex_source()) out.push_back(colors[s]);
  sort_unique(out);
  return out;
}

std::size_t darkest_index(const Palette& p) {
  std::size_t best = 0;
  double best_l = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double l = rgb_to_lab(p.colors[i]).L;
    if (l < best_l) {
      best_l = l;
      best = i;
    }
  }
  return best;
}

geom::HullMesh palette_hull(const Palette& p) { return geom::convex_hull(to_points(p.colors)); }

PaletteReport palette_from_colors(std::vector<Rgb> colors, const BinnedHistogram& hist,
                                  const PaletteOptions& opts) {
  if (colors.empty()) throw Error("palette: no colors");
  PaletteReport report;
  std::vector<Rgb> verts = hull_vertex_colors(std::move(colors));
  if (color_rank(verts) < 3) {
    report.degenerate = true;
    verts = pad_to_full_rank(std::move(verts));
  }
  const geom::HullMesh initial = geom::convex_hull(to_points(verts));
  report.initial_vertices = initial.vertex_count();

  auto clamped_rmse = [&](const geom::HullMesh& h) {
    const Palette p{clamped_vertices(h)};
    return binned_rmse(hist, palette_hull(p));
  };
  const auto seq = geom::simplify_hull(initial, [&](const geom::HullMesh& cand) {
    return cand.vertex_count() <= opts.measure_below && clamped_rmse(cand) > opts.rmse_tol;
  });

  // Accepted hulls above the measuring threshold were never checked; back off
  // towards the unsimplified hull until the tolerance holds.
  std::size_t pick = seq.size() - 1;
  double err = clamped_rmse(seq[pick]);
  while (err > opts.rmse_tol && pick > 0) {
    --pick;
    err = clamped_rmse(seq[pick]);
  }
  report.palette.colors = clamped_vertices(seq[pick]);
  report.rmse = err;
  report.collapses = pick;
  return report;
}

PaletteReport extract_palette_report(const Image& img, const PaletteOptions& opts) {
  if (img.empty()) throw Error("palette: empty image");
  return palette_from_colors(unique_colors(img), bin_image(img), opts);
}

Palette extract_palette(const Image& img, double rmse_tol) {
  PaletteOptions opts;
  opts.rmse_tol = rmse_tol;
  return extract_palette_report(img, opts).palette;
}

std::string palette_to_json(const Palette& p) {
  nlohmann::json j;
  j["colors"] = nlohmann::json::array();
  for (const auto& c : p.colors) j["colors"].push_back({c.r, c.g, c.b});
  return j.dump() + "\n";
}

Palette palette_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("palette json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("colors") || !j["colors"].is_array()) {
    throw FormatError("palette json: expected {\"colors\": [[r,g,b], ...]}");
  }
  Palette p;
  for (const auto& c : j["colors"]) {
    if (!c.is_array() || c.size() != 3) throw FormatError("palette json: color must be [r,g,b]");
    for (const auto& v : c) {
      if (!v.is_number()) throw FormatError("palette json: channels must be numbers");
    }
    const Rgb rgb{c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
    if (!std::isfinite(rgb.r) || !std::isfinite(rgb.g) || !std::isfinite(rgb.b)) {
      throw FormatError("palette json: non-finite channel");
    }
    if (clamp_unit(rgb) != rgb) throw FormatError("palette json: channels must lie in [0,1]");
    p.colors.push_back(rgb);
  }
  return p;
}

}  // namespace rgbxy
