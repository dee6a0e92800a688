#pragma once

#include <array>
#include <compare>
#include <cmath>

namespace rgbxy {

/// sRGB-companded color, channels nominally in [0,1].
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

struct Lab {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Cylindrical Lab. L in [0,100], C >= 0, h in degrees [0,360).
struct Lch {
  double L = 0.0;
  double C = 0.0;
  double h = 0.0;

  friend bool operator==(const Lch&, const Lch&) = default;
};

/// Result of an LCh -> RGB conversion. `clamped` is set when the exact
/// conversion fell outside the unit cube by more than rounding noise.
struct RgbConversion {
  Rgb rgb;
  bool clamped = false;
};

// Chroma below this is treated as achromatic: hue reported as 0 and
// harmonization leaves the color alone.
inline constexpr double kAchromaticChroma = 1e-8;

// Normalization used by the LC plane and by the palette/template distance.
inline constexpr double kLightnessScale = 100.0;
inline constexpr double kChromaScale = 134.0;

Lab rgb_to_lab(const Rgb& c);
RgbConversion lab_to_rgb(const Lab& c);

Lch lab_to_lch(const Lab& c);
Lab lch_to_lab(const Lch& c);

Lch rgb_to_lch(const Rgb& c);
RgbConversion lch_to_rgb(const Lch& c);

/// Wraps any finite angle into [0,360).
double normalize_hue(double degrees);

/// Unsigned shortest arc between two hues, in [0,180].
double hue_arc_distance(double h1, double h2);

/// Signed shortest rotation taking `from` onto `to`, in (-180,180].
double signed_hue_delta(double from, double to);

Rgb clamp_unit(const Rgb& c);

inline bool is_achromatic(const Lch& c) { return c.C < kAchromaticChroma; }

}  // namespace rgbxy
