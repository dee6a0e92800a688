#include "rgbxy/color.hpp"

#include <algorithm>
#include <numbers>

namespace rgbxy {

namespace {

// sRGB primaries, D65 white.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// White point taken from the matrix row sums so that (1,1,1) lands exactly
// on a = b = 0.
constexpr double kWhite[3] = {
    kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2],
    kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2],
    kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2],
};

struct Matrix3 {
  double m[3][3];
};

Matrix3 invert(const double a[3][3]) {
  Matrix3 r{};
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  const double inv = 1.0 / det;
  r.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) * inv;
  r.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * inv;
  r.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * inv;
  r.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) * inv;
  r.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * inv;
  r.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * inv;
  r.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) * inv;
  r.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * inv;
  r.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * inv;
  return r;
}

const Matrix3& xyz_to_rgb_matrix() {
  static const Matrix3 m = invert(kRgbToXyz);
  return m;
}

double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double lab_f(double t) {
  return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

double lab_f_inv(double f) {
  const double f3 = f * f * f;
  return f3 > kEpsilon ? f3 : (116.0 * f - 16.0) / kKappa;
}

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

}  // namespace

Lab rgb_to_lab(const Rgb& c) {
  const double lin[3] = {srgb_to_linear(c.r), srgb_to_linear(c.g),
                         srgb_to_linear(c.b)};
  double xyz[3];
  for (int i = 0; i < 3; ++i) {
    xyz[i] = kRgbToXyz[i][0] * lin[0] + kRgbToXyz[i][1] * lin[1] +
             kRgbToXyz[i][2] * lin[2];
  }
  const double fx = lab_f(xyz[0] / kWhite[0]);
  const double fy = lab_f(xyz[1] / kWhite[1]);
  const double fz = lab_f(xyz[2] / kWhite[2]);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

RgbConversion lab_to_rgb(const Lab& c) {
  const double fy = (c.L + 16.0) / 116.0;
  const double fx = fy + c.a / 500.0;
  const double fz = fy - c.b / 200.0;
  const double xyz[3] = {lab_f_inv(fx) * kWhite[0], lab_f_inv(fy) * kWhite[1],
                         lab_f_inv(fz) * kWhite[2]};
  const auto& m = xyz_to_rgb_matrix().m;
  double out[3];
  bool clamped = false;
  for (int i = 0; i < 3; ++i) {
    const double lin = m[i][0] * xyz[0] + m[i][1] * xyz[1] + m[i][2] * xyz[2];
    double v = linear_to_srgb(std::max(lin, 0.0));
    if (lin < -1e-9 || v > 1.0 + 1e-9) clamped = true;
    out[i] = std::clamp(v, 0.0, 1.0);
  }
  return {{out[0], out[1], out[2]}, clamped};
}

Lch lab_to_lch(const Lab& c) {
  const double chroma = std::hypot(c.a, c.b);
  if (chroma < kAchromaticChroma) return {c.L, chroma, 0.0};
  return {c.L, chroma, normalize_hue(std::atan2(c.b, c.a) * kDegPerRad)};
}

Lab lch_to_lab(const Lch& c) {
  const double rad = c.h / kDegPerRad;
  return {c.L, c.C * std::cos(rad), c.C * std::sin(rad)};
}

Lch rgb_to_lch(const Rgb& c) { return lab_to_lch(rgb_to_lab(c)); }

RgbConversion lch_to_rgb(const Lch& c) { return lab_to_rgb(lch_to_lab(c)); }

double normalize_hue(double degrees) {
  double h = std::fmod(degrees, 360.0);
  if (h < 0.0) h += 360.0;
  // fmod of a tiny negative value can round back up to 360.
  if (h >= 360.0) h -= 360.0;
  return h;
}

double hue_arc_distance(double h1, double h2) {
  const double d = normalize_hue(h1 - h2);
  return d > 180.0 ? 360.0 - d : d;
}

double signed_hue_delta(double from, double to) {
  const double d = normalize_hue(to - from);
  return d > 180.0 ? d - 360.0 : d;
}

Rgb clamp_unit(const Rgb& c) {
  return {std::clamp(c.r, 0.0, 1.0), std::clamp(c.g, 0.0, 1.0),
          std::clamp(c.b, 0.0, 1.0)};
}

}  // namespace rgbxy
