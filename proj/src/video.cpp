#include "rgbxy/video.hpp"

#include <algorithm>
#include <optional>

#include <omp.h>

#include "rgbxy/error.hpp"
#include "rgbxy/kernels.hpp"

namespace rgbxy {

namespace {

void check_frames(const std::vector<Image>& frames) {
  if (frames.empty()) throw Error("video: no frames");
  for (const auto& f : frames) {
    if (f.empty()) throw Error("video: empty frame");
    if (f.width() != frames[0].width() || f.height() != frames[0].height()) {
      throw Error("video: frames differ in size");
    }
  }
}

LayerWeights frame_weights(const Image& frame, const Palette& p, const DecomposeOptions& opts) {
  return relayer(precompute_rgbxy(frame, opts), p);
}

}  // namespace

PaletteReport video_global_palette(const std::vector<Image>& frames, const PaletteOptions& opts) {
  check_frames(frames);
  std::vector<Rgb> all;
  HistogramAccumulator acc;
  for (const auto& f : frames) {
    const std::vector<Rgb> v = hull_vertex_colors(unique_colors(f));
    all.insert(all.end(), v.begin(), v.end());
    acc.merge(kernels::bin_pixels_omp(f));
  }
  return palette_from_colors(std::move(all), acc.finish(), opts);
}

VideoResult harmonize_video(const std::vector<Image>& frames, const HarmonizeSpec& spec,
                            const VideoOptions& opts) {
  check_frames(frames);
  VideoResult res;
  res.global = video_global_palette(frames, opts.palette);
  const Palette& pal = res.global.palette;
  const std::size_t n = frames.size();
  const int workers = std::max(1, opts.workers);

  std::vector<std::optional<LayerWeights>> kept(n);
  std::vector<std::vector<double>> means(n);
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    LayerWeights w = frame_weights(frames[i], pal, opts.decompose);
    means[i] = w.column_means();
    if (opts.retain_weights) kept[i] = std::move(w);
  }

  // Sorting each column's per-frame values makes the sum independent of
  // frame order.
  res.weights.assign(pal.size(), 0.0);
  for (std::size_t c = 0; c < pal.size(); ++c) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = means[i][c];
    std::sort(col.begin(), col.end());
    for (double v : col) res.weights[c] += v;
    res.weights[c] /= static_cast<double>(n);
  }

  res.harmonization = harmonize_rgb_palette(pal, res.weights, spec);
  res.frames.resize(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const LayerWeights w = kept[i] ? std::move(*kept[i]) : frame_weights(frames[i], pal, opts.decompose);
    kept[i].reset();
    res.frames[i] = reconstruct(w, res.harmonization.palette, frames[i].width(), frames[i].height());
  }
  return res;
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error("no PNG frames in " + dir.string());
  return out;
}

}  // namespace rgbxy
