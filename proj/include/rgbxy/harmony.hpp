#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rgbxy/color.hpp"

namespace rgbxy {

enum class TemplateKind { monochrome, complementary, single_split, triad, double_split, square, analogous };

inline constexpr std::array<TemplateKind, 7> kAllTemplateKinds = {
    TemplateKind::monochrome, TemplateKind::complementary, TemplateKind::single_split,
    TemplateKind::triad,      TemplateKind::double_split,  TemplateKind::square,
    TemplateKind::analogous};

enum class AxisType { attract, sector_bound };

struct Axis {
  double angle = 0.0;  // [0,360)
  AxisType type = AxisType::attract;
};

std::string_view to_string(TemplateKind k);
TemplateKind template_kind_from_string(std::string_view s);  // throws Error

/// True for kinds with the secondary angle (single split, double split, analogous).
bool has_alpha2(TemplateKind k);

/// Axes of a template. Analogous yields its two sector bounds.
std::vector<Axis> template_axes(TemplateKind kind, double alpha1, double alpha2 = 0.0);

struct HarmonicTemplate {
  TemplateKind kind = TemplateKind::monochrome;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  std::vector<Axis> axes() const { return template_axes(kind, alpha1, alpha2); }
};

/// Per-color axis match. axis = -1 for achromatic colors, which are hue-free.
struct AxisMatch {
  int axis = -1;
  double distance = 0.0;  // degrees; 0 inside an analogous sector
  bool in_sector = false;
};

using AxisAssignment = std::vector<AxisMatch>;

/// Normalized L and C: L/100 and C/134.
double norm_l(const Lch& c);
double norm_c(const Lch& c);

AxisAssignment assign_axes(const std::vector<Lch>& palette, const std::vector<Axis>& axes);

/// Weighted sum of W * L * C * arc distance to the nearest axis.
double palette_template_distance(const std::vector<Lch>& palette, const std::vector<double>& weights,
                                 const std::vector<Axis>& axes);

struct TemplateFit {
  HarmonicTemplate tmpl;
  double distance = 0.0;
};

/// Exhaustive 1-degree grid over alpha1 in [0,360) and alpha2 in [-15,15].
/// Ties go to the smallest alpha1, then the smallest alpha2.
TemplateFit fit_template(const std::vector<Lch>& palette, const std::vector<double>& weights,
                         TemplateKind kind);

/// Number of axis groups a kind has: its axis count, one for the analogous sector.
int group_count(TemplateKind kind);

/// Group of each color (axis index, the sector for analogous), -1 if unassigned.
std::vector<int> color_groups(TemplateKind kind, const AxisAssignment& a);

/// True when every group of the template received at least one color.
bool covers_all_groups(TemplateKind kind, const AxisAssignment& a);

/// Best fit over the given kinds, dropping fits that leave a group empty
/// (monochrome is never dropped). Ties go to fewer groups, then kind order.
TemplateFit select_optimal_template(const std::vector<Lch>& palette,
                                    const std::vector<double>& weights,
                                    const std::vector<TemplateKind>& kinds = {kAllTemplateKinds.begin(),
                                                                              kAllTemplateKinds.end()});

/// Rotates each assigned chromatic hue by beta times its signed arc to the
/// axis. L and C are copied untouched.
std::vector<Lch> harmonize_palette(const std::vector<Lch>& palette, const AxisAssignment& assignment,
                                   const std::vector<Axis>& axes, double beta);

// Convenience: fit-free harmonization with a given template.
std::vector<Lch> harmonize_palette(const std::vector<Lch>& palette, const HarmonicTemplate& t,
                                   double beta);

// ---- lightness/chroma templates ----

enum class LcKind { lc1 = 1, lc2, lc3, lc4, lc5, lc6 };

std::string_view to_string(LcKind k);
LcKind lc_kind_from_string(std::string_view s);

/// Point in the normalized LC plane: x = C, y = L.
struct LcPoint {
  double c = 0.0;
  double l = 0.0;
};

struct LcLine {
  LcPoint origin;
  LcPoint dir;  // unit
};

/// Line of a template. epsilon is the axis position for LC1/LC2/LC5/LC6 and
/// the rotation in degrees for LC3/LC4.
LcLine lc_line(LcKind kind, double epsilon, std::optional<LcPoint> pivot = std::nullopt);

inline constexpr LcPoint kBlackPivot{0.0, 0.0};
inline constexpr LcPoint kWhitePivot{0.0, 1.0};
inline constexpr LcPoint kNeutralPivot{0.0, 0.5};

/// Weighted mean squared perpendicular distance (weights normalized to sum 1).
double lc_objective(const std::vector<LcPoint>& pts, const std::vector<double>& weights,
                    const LcLine& line);

struct LcFit {
  LcKind kind = LcKind::lc1;
  double epsilon = 0.0;
  double objective = 0.0;
};

/// Closed forms for LC1/LC2/LC5/LC6; 1-degree search over [-90,90) for LC3/LC4.
LcFit fit_lc_template(const std::vector<Lch>& palette, const std::vector<double>& weights, LcKind kind,
                      std::optional<LcPoint> pivot = std::nullopt);

LcFit select_optimal_lc_template(const std::vector<Lch>& palette, const std::vector<double>& weights);

/// Pure black and white entries are left out of LC harmonization.
bool is_black_or_white(const Lch& c);

struct LcOptions {
  bool neutral_snap = true;
};

struct LcResult {
  std::vector<Lch> palette;
  std::vector<LcPoint> points;  // unclamped line positions; excluded colors keep theirs
  std::vector<char> moved;
};

/// Projects each group onto its line, keeps the extremes and spaces the rest
/// evenly. With `groups` empty the whole palette is one group fitted with
/// `epsilon`; otherwise each group is fitted on its own, LC3/LC4 pivoting at
/// the neutral point.
LcResult apply_lc_template(const std::vector<Lch>& palette, const std::vector<double>& weights, LcKind kind,
                           double epsilon, const std::vector<int>& groups = {},
                           const LcOptions& opts = {});

// ---- contrast operators ----

enum class ContrastKind { hue, light_dark, complementary, simultaneous, saturation, extension, cold_warm };

std::string_view to_string(ContrastKind k);
ContrastKind contrast_kind_from_string(std::string_view s);

/// LCh hues of the pure sRGB primaries and of cyan.
double red_hue();
double green_hue();
double blue_hue();
double cyan_hue();

/// Axes of the cold-warm template: the red-cyan divide rotated by 90 degrees.
std::vector<Axis> cold_warm_axes();

struct ContrastResult {
  std::vector<Lch> palette;
  std::vector<Axis> axes;
  AxisAssignment assignment;
  std::optional<TemplateFit> fit;
  std::optional<LcFit> lc;
};

inline constexpr double kSimultaneousChromaSlope = 0.5;

ContrastResult contrast_operator(const std::vector<Lch>& palette, const std::vector<double>& weights,
                                 ContrastKind kind, double beta);

/// Per-group sums of L*C*W over normalized L, C.
std::vector<double> extension_sums(const std::vector<Lch>& palette, const std::vector<double>& weights,
                                   const std::vector<int>& groups, int group_count);

/// Weights for palettes without an image: uniform.
std::vector<double> uniform_weights(std::size_t n);

std::vector<Lch> to_lch(const std::vector<Rgb>& colors);
std::vector<Rgb> to_rgb(const std::vector<Lch>& colors);  // clamped

}  // namespace rgbxy
