#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rgbxy/geom/point_set.hpp"
#include "rgbxy/image.hpp"
#include "rgbxy/palette.hpp"
#include "rgbxy/weights.hpp"

namespace rgbxy {

struct DecomposeOptions {
  /// Multiplier on the normalized XY coordinates (x / max(W, H)).
  double xy_scale = 1.0;
};

/// Cached first level of the decomposition: RGBXY hull vertices and the
/// pixel weights over them. Independent of the palette.
struct DecompositionState {
  int width = 0;
  int height = 0;
  double xy_scale = 1.0;
  geom::PointSet vertices{5};  // Q x (r, g, b, x, y)
  SparseRows w_rgbxy;          // N x Q

  std::size_t q() const { return vertices.size(); }
  std::size_t pixel_count() const { return w_rgbxy.rows(); }

  friend bool operator==(const DecompositionState& a, const DecompositionState& b) {
    return a.width == b.width && a.height == b.height && a.xy_scale == b.xy_scale &&
           a.vertices.coords() == b.vertices.coords() && a.w_rgbxy == b.w_rgbxy;
  }
};

struct PrecomputeReport {
  int rank = 0;                 // affine rank of the RGBXY cloud
  std::size_t simplices = 0;
  std::size_t outside = 0;      // pixels located beyond tolerance
  double worst_bary = 0.0;      // most negative coordinate before clamping
  bool star_fallback = false;   // Delaunay broke down; star tessellation used
};

/// RGBXY coordinates of pixel i.
void rgbxy_point(const Image& img, std::size_t i, double xy_scale, double* out);

DecompositionState precompute_rgbxy(const Image& img, const DecomposeOptions& opts = {},
                                    PrecomputeReport* report = nullptr);

/// Q x P weights of the RGBXY vertices' colors over the palette: star
/// tessellation of the palette hull at its darkest vertex, closest-point
/// weights for colors outside it.
SparseRows compute_w_rgb(const Palette& pal, const DecompositionState& state);

/// Weights of arbitrary colors over the palette, with the same rules.
SparseRows palette_weights(const Palette& pal, std::span<const Rgb> colors);

LayerWeights compose_weights(const DecompositionState& state, const SparseRows& w_rgb);

LayerWeights relayer(const DecompositionState& state, const Palette& pal);

Image reconstruct(const LayerWeights& w, const Palette& pal, int width, int height);

/// One RGBA layer per palette color with 8-bit alpha. Alphas are rounded by
/// largest remainder so each pixel's alphas sum to 255.
std::vector<Rgba8Image> export_layers(const LayerWeights& w, const Palette& pal, int width,
                                      int height);

// Binary container: one JSON header line, then little-endian
// (u32 row, u32 col, f32 value) triplets.
std::vector<std::uint8_t> serialize_state(const DecompositionState& state);
DecompositionState deserialize_state(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_weights(const LayerWeights& w, int width, int height);
LayerWeights deserialize_weights(std::span<const std::uint8_t> bytes);

}  // namespace rgbxy
