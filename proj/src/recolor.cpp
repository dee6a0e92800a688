#include "rgbxy/recolor.hpp"

namespace rgbxy {

PaletteHarmonization harmonize_rgb_palette(const Palette& p, const std::vector<double>& weights,
                                           const HarmonizeSpec& spec) {
  PaletteHarmonization h;
  h.original = to_lch(p.colors);
  h.fit = spec.kind ? fit_template(h.original, weights, *spec.kind)
                    : select_optimal_template(h.original, weights);
  const std::vector<Axis> axes = h.fit.tmpl.axes();
  h.assignment = assign_axes(h.original, axes);
  h.harmonized = harmonize_palette(h.original, h.assignment, axes, spec.beta);
  // Unchanged colors keep their exact RGB rather than a conversion round trip.
  h.palette = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(h.harmonized[i] == h.original[i])) h.palette.colors[i] = lch_to_rgb(h.harmonized[i]).rgb;
  }
  return h;
}

Palette palette_from_lch(const std::vector<Lch>& colors) { return Palette{to_rgb(colors)}; }

std::vector<double> palette_weights_of(const LayerWeights& w) { return w.column_means(); }

}  // namespace rgbxy
