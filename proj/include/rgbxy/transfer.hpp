#pragma once

#include <vector>

#include "rgbxy/color.hpp"
#include "rgbxy/harmony.hpp"

namespace rgbxy {

struct TransferResult {
  std::vector<Lch> palette;     // L clamped to [0,100], C >= 0
  std::vector<Lch> unclamped;   // before range clamping
  TemplateFit reference_fit;
  TemplateFit input_fit;        // template alignment only
  double gamma = 0.0;           // template alignment only
};

/// Hue of each template group: the axis angle, the sector center for analogous.
std::vector<double> group_hues(const HarmonicTemplate& t);

/// Index of the group with the largest summed weight. Ties go to the larger
/// summed chroma, then to the lower index.
int main_axis(const std::vector<Lch>& palette, const std::vector<double>& weights,
              const HarmonicTemplate& t);

/// Rotates the input palette so its main axis meets the reference's, then
/// harmonizes it onto the reference template at beta = 1.
TransferResult template_align(const std::vector<Lch>& input, const std::vector<double>& input_w,
                              const std::vector<Lch>& reference, const std::vector<double>& reference_w);

/// Harmonizes the input onto the reference template without rotation, then
/// scales L and C so their weighted means match the reference's.
TransferResult template_transfer(const std::vector<Lch>& input, const std::vector<double>& input_w,
                                 const std::vector<Lch>& reference, const std::vector<double>& reference_w);

/// Weighted means of normalized-weight L and C (raw LCh units).
double weighted_mean_l(const std::vector<Lch>& p, const std::vector<double>& w);
double weighted_mean_c(const std::vector<Lch>& p, const std::vector<double>& w);

}  // namespace rgbxy
