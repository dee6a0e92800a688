#pragma once

#include <filesystem>
#include <vector>

#include "rgbxy/decomposer.hpp"
#include "rgbxy/palette.hpp"
#include "rgbxy/recolor.hpp"

namespace rgbxy {

/// One palette for a whole sequence: the hull of every frame's hull vertices,
/// simplified against the histogram of all frames.
PaletteReport video_global_palette(const std::vector<Image>& frames, const PaletteOptions& opts = {});

struct VideoOptions {
  PaletteOptions palette;
  DecomposeOptions decompose;
  /// Keep each frame's weights between the averaging and recoloring passes.
  /// Off: recompute them in the second pass and hold one frame at a time.
  bool retain_weights = true;
  int workers = 1;
};

struct VideoResult {
  PaletteReport global;
  std::vector<double> weights;  // W(P_i) averaged over frames
  PaletteHarmonization harmonization;
  std::vector<Image> frames;
};

VideoResult harmonize_video(const std::vector<Image>& frames, const HarmonizeSpec& spec,
                            const VideoOptions& opts = {});

/// PNG files of a frame directory in name order.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

}  // namespace rgbxy
