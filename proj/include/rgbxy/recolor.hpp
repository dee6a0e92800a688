#pragma once

// Palette edits applied through the layer weights.

#include <optional>
#include <vector>

#include "rgbxy/decomposer.hpp"
#include "rgbxy/harmony.hpp"
#include "rgbxy/palette.hpp"

namespace rgbxy {

struct HarmonizeSpec {
  std::optional<TemplateKind> kind;  // empty: optimal template
  double beta = 1.0;
};

struct PaletteHarmonization {
  TemplateFit fit;
  AxisAssignment assignment;
  std::vector<Lch> original;
  std::vector<Lch> harmonized;
  Palette palette;  // harmonized, converted back to RGB (clamped)
};

/// Fits the template (or the optimal one) to the palette under the given
/// per-color weights and harmonizes it.
PaletteHarmonization harmonize_rgb_palette(const Palette& p, const std::vector<double>& weights,
                                           const HarmonizeSpec& spec);

Palette palette_from_lch(const std::vector<Lch>& colors);

/// Per-color image weights W(P_i): column means of the layer weights.
std::vector<double> palette_weights_of(const LayerWeights& w);

}  // namespace rgbxy
