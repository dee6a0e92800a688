#pragma once

// Palette edits on one image, shared by the command line and the socket
// service so both deliver the same pixels and reports.

#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rgbxy/decomposer.hpp"
#include "rgbxy/harmony.hpp"
#include "rgbxy/palette.hpp"
#include "rgbxy/recolor.hpp"
#include "rgbxy/transfer.hpp"

namespace rgbxy {

enum class TransferMode { align, transfer };

std::string_view to_string(TransferMode m);
TransferMode transfer_mode_from_string(std::string_view s);

/// A recolored palette plus the JSON report describing how it was obtained.
struct PaletteEdit {
  Palette palette;
  nlohmann::json report;
};

nlohmann::json colors_json(const Palette& p);
Palette palette_from_colors_json(const nlohmann::json& colors);

/// {kind, alpha1, alpha2, beta}
nlohmann::json template_descriptor(const HarmonicTemplate& t, double beta);
/// {kind, epsilon}
nlohmann::json lc_descriptor(const LcFit& fit);

/// Replaces only the entries whose LCh changed, so untouched colors keep
/// their exact RGB.
Palette apply_lch(const Palette& p, const std::vector<Lch>& before, const std::vector<Lch>& after);

TemplateFit fit_palette(const Palette& p, const std::vector<double>& weights,
                        const std::vector<TemplateKind>& kinds);

PaletteEdit harmonize_edit(const Palette& p, const std::vector<double>& weights, const HarmonizeSpec& spec);

/// kind empty: optimal LC template. per_axis: each group of the optimal hue
/// template is fitted on its own.
PaletteEdit lc_edit(const Palette& p, const std::vector<double>& weights, std::optional<LcKind> kind,
                    bool per_axis = false);

PaletteEdit contrast_edit(const Palette& p, const std::vector<double>& weights, ContrastKind kind,
                          double beta);

PaletteEdit transfer_edit(const Palette& p, const std::vector<double>& weights, const Palette& ref,
                          const std::vector<double>& ref_weights, TransferMode mode);

/// Cached decomposition of one image. The layer weights always belong to
/// base_palette(); recoloring edits change palette() only.
class EditSession {
 public:
  EditSession(Image img, DecompositionState state);

  const Image& image() const { return image_; }
  const DecompositionState& state() const { return state_; }
  const Palette& base_palette() const { return base_; }
  const Palette& palette() const { return shown_; }
  const LayerWeights& weights() const { return weights_; }
  std::vector<double> color_weights() const { return palette_weights_of(weights_); }

  /// Extracts the palette from the image and relayers.
  PaletteReport auto_palette(const PaletteOptions& opts);
  /// Relayers with a new palette.
  void set_palette(Palette p);
  /// Recolors through the current weights.
  void show(Palette p);

  Image render() const;
  std::vector<Rgba8Image> layers() const;

 private:
  Image image_;
  DecompositionState state_;
  Palette base_;
  Palette shown_;
  LayerWeights weights_;
};

}  // namespace rgbxy
