#include "rgbxy/harmony.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "rgbxy/error.hpp"

namespace rgbxy {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBaseSpread = 30.0;
constexpr int kAlpha2Min = -15;
constexpr int kAlpha2Max = 15;

void check_weights(const std::vector<Lch>& palette, const std::vector<double>& weights) {
  if (weights.size() != palette.size()) throw Error("harmony: one weight per palette color required");
}

// Weights rescaled to sum 1; uniform when they sum to zero.
std::vector<double> normalized(const std::vector<double>& w) {
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(s > 0.0)) return uniform_weights(w.size());
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / s;
  return out;
}

LcPoint lc_point(const Lch& c) { return {norm_c(c), norm_l(c)}; }

double dot(const LcPoint& a, const LcPoint& b) { return a.c * b.c + a.l * b.l; }

double perp(const LcPoint& p, const LcLine& line) {
  const double dc = p.c - line.origin.c;
  const double dl = p.l - line.origin.l;
  return dc * line.dir.l - dl * line.dir.c;
}

bool is_pivot_kind(LcKind k) { return k == LcKind::lc3 || k == LcKind::lc4; }

LcFit fit_points(const std::vector<LcPoint>& pts, const std::vector<double>& weights, LcKind kind,
                 std::optional<LcPoint> pivot) {
  LcFit fit;
  fit.kind = kind;
  if (pts.empty()) return fit;
  const std::vector<double> w = normalized(weights);
  double sc = 0.0, sl = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sc += w[i] * pts[i].c;
    sl += w[i] * pts[i].l;
  }
  switch (kind) {
    case LcKind::lc1:
      fit.epsilon = sc;
      break;
    case LcKind::lc2:
      fit.epsilon = sl;
      break;
    case LcKind::lc5:
      fit.epsilon = sc - sl;
      break;
    case LcKind::lc6:
      fit.epsilon = sc + sl;
      break;
    case LcKind::lc3:
    case LcKind::lc4: {
      double best = std::numeric_limits<double>::infinity();
      for (int deg = -90; deg < 90; ++deg) {
        const double obj = lc_objective(pts, w, lc_line(kind, deg, pivot));
        if (obj < best) {
          best = obj;
          fit.epsilon = deg;
        }
      }
      break;
    }
  }
  fit.objective = lc_objective(pts, w, lc_line(kind, fit.epsilon, pivot));
  return fit;
}

}  // namespace

std::string_view to_string(TemplateKind k) {
  switch (k) {
    case TemplateKind::monochrome: return "monochrome";
    case TemplateKind::complementary: return "complementary";
    case TemplateKind::single_split: return "single_split";
    case TemplateKind::triad: return "triad";
    case TemplateKind::double_split: return "double_split";
    case TemplateKind::square: return "square";
    case TemplateKind::analogous: return "analogous";
  }
  return "?";
}

TemplateKind template_kind_from_string(std::string_view s) {
  for (TemplateKind k : kAllTemplateKinds) {
    if (to_string(k) == s) return k;
  }
  throw Error("unknown template kind: " + std::string(s));
}

bool has_alpha2(TemplateKind k) {
  return k == TemplateKind::single_split || k == TemplateKind::double_split ||
         k == TemplateKind::analogous;
}

std::vector<Axis> template_axes(TemplateKind kind, double alpha1, double alpha2) {
  if (!std::isfinite(alpha1) || !std::isfinite(alpha2)) throw InvalidAngle("template angle not finite");
  if (has_alpha2(kind)) {
    if (alpha2 < kAlpha2Min || alpha2 > kAlpha2Max) {
      throw InvalidAngle("alpha2 must lie in [-15,15]");
    }
  } else if (alpha2 != 0.0) {
    throw InvalidAngle(std::string(to_string(kind)) + " has no secondary angle");
  }
  const double s = kBaseSpread + alpha2;
  std::vector<double> base;
  AxisType type = AxisType::attract;
  switch (kind) {
    case TemplateKind::monochrome: base = {0.0}; break;
    case TemplateKind::complementary: base = {0.0, 180.0}; break;
    case TemplateKind::single_split: base = {0.0, 180.0 - s, 180.0 + s}; break;
    case TemplateKind::triad: base = {0.0, 120.0, 240.0}; break;
    case TemplateKind::double_split: base = {-s / 2, s / 2, 180.0 - s / 2, 180.0 + s / 2}; break;
    case TemplateKind::square: base = {0.0, 90.0, 180.0, 270.0}; break;
    case TemplateKind::analogous:
      base = {-s, s};
      type = AxisType::sector_bound;
      break;
  }
  std::vector<Axis> axes;
  for (double b : base) axes.push_back({normalize_hue(b + alpha1), type});
  return axes;
}

double norm_l(const Lch& c) { return c.L / kLightnessScale; }
double norm_c(const Lch& c) { return c.C / kChromaScale; }

AxisAssignment assign_axes(const std::vector<Lch>& palette, const std::vector<Axis>& axes) {
  AxisAssignment out(palette.size());
  for (std::size_t i = 0; i < palette.size(); ++i) {
    const Lch& c = palette[i];
    if (is_achromatic(c)) continue;
    AxisMatch m;
    m.distance = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < axes.size(); ++j) {
      const double d = hue_arc_distance(c.h, axes[j].angle);
      if (d < m.distance) {
        m.distance = d;
        m.axis = static_cast<int>(j);
      }
    }
    // Sector bounds come in (lower, upper) pairs; the arc between them is free.
    for (std::size_t j = 0; j + 1 < axes.size(); ++j) {
      if (axes[j].type != AxisType::sector_bound || axes[j + 1].type != AxisType::sector_bound) continue;
      const double width = normalize_hue(axes[j + 1].angle - axes[j].angle);
      if (normalize_hue(c.h - axes[j].angle) <= width) {
        m.distance = 0.0;
        m.in_sector = true;
      }
      ++j;
    }
    out[i] = m;
  }
  return out;
}

double palette_template_distance(const std::vector<Lch>& palette, const std::vector<double>& weights,
                                 const std::vector<Axis>& axes) {
  check_weights(palette, weights);
  const AxisAssignment a = assign_axes(palette, axes);
  double d = 0.0;
  for (std::size_t i = 0; i < palette.size(); ++i) {
    if (a[i].axis < 0) continue;
    d += weights[i] * norm_l(palette[i]) * norm_c(palette[i]) * a[i].distance;
  }
  return d;
}

TemplateFit fit_template(const std::vector<Lch>& palette, const std::vector<double>& weights,
                         TemplateKind kind) {
  check_weights(palette, weights);
  const int lo2 = has_alpha2(kind) ? kAlpha2Min : 0;
  const int hi2 = has_alpha2(kind) ? kAlpha2Max : 0;
  const int n2 = hi2 - lo2 + 1;
  const int total = 360 * n2;
  std::vector<double> dist(total);
#pragma omp parallel for schedule(static)
  for (int g = 0; g < total; ++g) {
    const int a1 = g / n2;
    const int a2 = lo2 + g % n2;
    dist[g] = palette_template_distance(palette, weights, template_axes(kind, a1, a2));
  }
  int best = 0;
  for (int g = 1; g < total; ++g) {
    if (dist[g] < dist[best]) best = g;
  }
  TemplateFit fit;
  fit.tmpl = {kind, static_cast<double>(best / n2), static_cast<double>(lo2 + best % n2)};
  fit.distance = dist[best];
  return fit;
}

int group_count(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::monochrome:
    case TemplateKind::analogous:
      return 1;
    case TemplateKind::complementary:
      return 2;
    case TemplateKind::single_split:
    case TemplateKind::triad:
      return 3;
    case TemplateKind::double_split:
    case TemplateKind::square:
      return 4;
  }
  return 1;
}

std::vector<int> color_groups(TemplateKind kind, const AxisAssignment& a) {
  std::vector<int> g(a.size(), -1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].axis < 0) continue;
    g[i] = kind == TemplateKind::analogous ? 0 : a[i].axis;
  }
  return g;
}

bool covers_all_groups(TemplateKind kind, const AxisAssignment& a) {
  std::vector<char> seen(group_count(kind), 0);
  for (int g : color_groups(kind, a)) {
    if (g >= 0) seen[g] = 1;
  }
  return std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
}

TemplateFit select_optimal_template(const std::vector<Lch>& palette, const std::vector<double>& weights,
                                    const std::vector<TemplateKind>& kinds) {
  std::vector<TemplateKind> order = kinds;
  std::sort(order.begin(), order.end());
  std::optional<TemplateFit> best;
  for (TemplateKind k : order) {
    const TemplateFit f = fit_template(palette, weights, k);
    if (k != TemplateKind::monochrome &&
        !covers_all_groups(k, assign_axes(palette, f.tmpl.axes()))) {
      continue;
    }
    if (!best || f.distance < best->distance ||
        (f.distance == best->distance && group_count(k) < group_count(best->tmpl.kind))) {
      best = f;
    }
  }
  if (!best) throw NoValidTemplate("no template has a color on every axis");
  return *best;
}

std::vector<Lch> harmonize_palette(const std::vector<Lch>& palette, const AxisAssignment& assignment,
                                   const std::vector<Axis>& axes, double beta) {
  if (assignment.size() != palette.size()) throw Error("harmonize: assignment size mismatch");
  std::vector<Lch> out = palette;
  for (std::size_t i = 0; i < palette.size(); ++i) {
    const AxisMatch& m = assignment[i];
    if (m.axis < 0 || m.in_sector || is_achromatic(palette[i])) continue;
    const double h = palette[i].h;
    out[i].h = normalize_hue(h + beta * signed_hue_delta(h, axes[m.axis].angle));
  }
  return out;
}

std::vector<Lch> harmonize_palette(const std::vector<Lch>& palette, const HarmonicTemplate& t,
                                   double beta) {
  const std::vector<Axis> axes = t.axes();
  return harmonize_palette(palette, assign_axes(palette, axes), axes, beta);
}

std::string_view to_string(LcKind k) {
  switch (k) {
    case LcKind::lc1: return "LC1";
    case LcKind::lc2: return "LC2";
    case LcKind::lc3: return "LC3";
    case LcKind::lc4: return "LC4";
    case LcKind::lc5: return "LC5";
    case LcKind::lc6: return "LC6";
  }
  return "?";
}

LcKind lc_kind_from_string(std::string_view s) {
  for (int i = 1; i <= 6; ++i) {
    const auto k = static_cast<LcKind>(i);
    const std::string_view name = to_string(k);
    if (s.size() == name.size() &&
        std::equal(s.begin(), s.end(), name.begin(),
                   [](char a, char b) { return std::toupper(static_cast<unsigned char>(a)) == b; })) {
      return k;
    }
  }
  throw Error("unknown LC template: " + std::string(s));
}

LcLine lc_line(LcKind kind, double epsilon, std::optional<LcPoint> pivot) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case LcKind::lc1: return {{epsilon, 0.0}, {0.0, 1.0}};
    case LcKind::lc2: return {{0.0, epsilon}, {1.0, 0.0}};
    case LcKind::lc3:
    case LcKind::lc4: {
      const double a = epsilon * kPi / 180.0;
      const LcPoint p = pivot ? *pivot : (kind == LcKind::lc3 ? kBlackPivot : kWhitePivot);
      return {p, {std::cos(a), std::sin(a)}};
    }
    case LcKind::lc5: return {{epsilon, 0.0}, {r, r}};
    case LcKind::lc6: return {{epsilon, 0.0}, {-r, r}};
  }
  throw Error("bad LC kind");
}

double lc_objective(const std::vector<LcPoint>& pts, const std::vector<double>& weights,
                    const LcLine& line) {
  const std::vector<double> w = normalized(weights);
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = perp(pts[i], line);
    s += w[i] * d * d;
  }
  return s;
}

bool is_black_or_white(const Lch& c) {
  const double l = norm_l(c);
  return (l < 0.02 || l > 0.98) && norm_c(c) < 0.02;
}

LcFit fit_lc_template(const std::vector<Lch>& palette, const std::vector<double>& weights, LcKind kind,
                      std::optional<LcPoint> pivot) {
  check_weights(palette, weights);
  std::vector<LcPoint> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < palette.size(); ++i) {
    if (is_black_or_white(palette[i])) continue;
    pts.push_back(lc_point(palette[i]));
    w.push_back(weights[i]);
  }
  return fit_points(pts, w, kind, pivot);
}

LcFit select_optimal_lc_template(const std::vector<Lch>& palette, const std::vector<double>& weights) {
  LcFit best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 6; ++i) {
    const LcFit f = fit_lc_template(palette, weights, static_cast<LcKind>(i));
    if (f.objective < best.objective) best = f;
  }
  return best;
}

LcResult apply_lc_template(const std::vector<Lch>& palette, const std::vector<double>& weights, LcKind kind,
                           double epsilon, const std::vector<int>& groups, const LcOptions& opts) {
  check_weights(palette, weights);
  if (!groups.empty() && groups.size() != palette.size()) throw Error("lc: group size mismatch");
  LcResult res;
  res.palette = palette;
  res.moved.assign(palette.size(), 0);
  for (const auto& c : palette) res.points.push_back(lc_point(c));

  const int ngroups =
      groups.empty() ? 1 : std::max(0, *std::max_element(groups.begin(), groups.end()) + 1);
  for (int g = 0; g < ngroups; ++g) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < palette.size(); ++i) {
      const int gi = groups.empty() ? 0 : groups[i];
      if (gi == g && !is_black_or_white(palette[i])) members.push_back(i);
    }
    if (members.empty()) continue;

    LcLine line;
    if (groups.empty()) {
      line = lc_line(kind, epsilon);
    } else {
      std::vector<LcPoint> pts;
      std::vector<double> w;
      for (std::size_t i : members) {
        pts.push_back(res.points[i]);
        w.push_back(weights[i]);
      }
      const std::optional<LcPoint> pivot =
          is_pivot_kind(kind) ? std::optional<LcPoint>(kNeutralPivot) : std::nullopt;
      line = lc_line(kind, fit_points(pts, w, kind, pivot).epsilon, pivot);
    }

    std::vector<std::pair<double, std::size_t>> proj;
    for (std::size_t i : members) {
      const LcPoint d{res.points[i].c - line.origin.c, res.points[i].l - line.origin.l};
      proj.push_back({dot(d, line.dir), i});
    }
    std::sort(proj.begin(), proj.end());
    const std::size_t m = proj.size();
    std::vector<double> t(palette.size(), 0.0);
    const double t0 = proj.front().first;
    const double t1 = proj.back().first;
    for (std::size_t k = 0; k < m; ++k) {
      double tk = proj[k].first;
      if (m > 2 && k > 0 && k + 1 < m) tk = t0 + (t1 - t0) * static_cast<double>(k) / (m - 1);
      t[proj[k].second] = tk;
    }

    if (opts.neutral_snap && std::abs(line.dir.l) > 1e-12) {
      std::size_t pick = members.front();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i : members) {
        const double gap = std::abs(line.origin.l + t[i] * line.dir.l - 0.5);
        if (gap < best) {
          best = gap;
          pick = i;
        }
      }
      const double shift = (0.5 - (line.origin.l + t[pick] * line.dir.l)) / line.dir.l;
      for (std::size_t i : members) t[i] += shift;
    }

    for (std::size_t i : members) {
      const LcPoint p{line.origin.c + t[i] * line.dir.c, line.origin.l + t[i] * line.dir.l};
      res.points[i] = p;
      res.palette[i].L = std::clamp(p.l, 0.0, 1.0) * kLightnessScale;
      res.palette[i].C = std::max(p.c, 0.0) * kChromaScale;
      res.moved[i] = 1;
    }
  }
  return res;
}

std::string_view to_string(ContrastKind k) {
  switch (k) {
    case ContrastKind::hue: return "hue";
    case ContrastKind::light_dark: return "light_dark";
    case ContrastKind::complementary: return "complementary";
    case ContrastKind::simultaneous: return "simultaneous";
    case ContrastKind::saturation: return "saturation";
    case ContrastKind::extension: return "extension";
    case ContrastKind::cold_warm: return "cold_warm";
  }
  return "?";
}

ContrastKind contrast_kind_from_string(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(ContrastKind::cold_warm); ++i) {
    const auto k = static_cast<ContrastKind>(i);
    if (to_string(k) == s) return k;
  }
  throw Error("unknown contrast kind: " + std::string(s));
}

double red_hue() { return rgb_to_lch({1.0, 0.0, 0.0}).h; }
double green_hue() { return rgb_to_lch({0.0, 1.0, 0.0}).h; }
double blue_hue() { return rgb_to_lch({0.0, 0.0, 1.0}).h; }
double cyan_hue() { return rgb_to_lch({0.0, 1.0, 1.0}).h; }

std::vector<Axis> cold_warm_axes() {
  // Red and cyan are not opposite in LCh; the divide runs midway between
  // red and the antipode of cyan.
  const double divide = normalize_hue(red_hue() + 0.5 * signed_hue_delta(red_hue(), cyan_hue() + 180.0));
  return {{normalize_hue(divide + 90.0), AxisType::attract},
          {normalize_hue(divide + 270.0), AxisType::attract}};
}

std::vector<double> extension_sums(const std::vector<Lch>& palette, const std::vector<double>& weights,
                                   const std::vector<int>& groups, int group_count) {
  std::vector<double> s(group_count, 0.0);
  for (std::size_t i = 0; i < palette.size(); ++i) {
    if (groups[i] < 0) continue;
    s[groups[i]] += norm_l(palette[i]) * norm_c(palette[i]) * weights[i];
  }
  return s;
}

namespace {

// Blends L and C towards a target palette by beta.
void blend_lc(std::vector<Lch>& out, const std::vector<Lch>& target, double beta) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (target[i].L == out[i].L && target[i].C == out[i].C) continue;
    out[i].L = std::clamp(out[i].L + beta * (target[i].L - out[i].L), 0.0, kLightnessScale);
    out[i].C = std::max(0.0, out[i].C + beta * (target[i].C - out[i].C));
  }
}

// Lightness scale factors that equalize per-group sums of L*C*W.
std::vector<Lch> equalize_extension(const std::vector<Lch>& palette, const std::vector<double>& weights,
                                    const std::vector<int>& groups, int ngroups) {
  const std::vector<double> sums = extension_sums(palette, weights, groups, ngroups);
  std::vector<double> reach(ngroups, 0.0);
  for (std::size_t i = 0; i < palette.size(); ++i) {
    if (groups[i] >= 0 && palette[i].L > 0.0) reach[groups[i]] += norm_c(palette[i]) * weights[i];
  }
  std::vector<int> active;
  for (int g = 0; g < ngroups; ++g) {
    if (sums[g] > 0.0) active.push_back(g);
  }
  std::vector<Lch> out = palette;
  if (active.size() < 2) return out;
  double target = 0.0;
  double cap = std::numeric_limits<double>::infinity();
  for (int g : active) {
    target += sums[g];
    cap = std::min(cap, reach[g]);
  }
  target = std::min(target / static_cast<double>(active.size()), cap);

  for (int g : active) {
    auto sum_at = [&](double k) {
      double s = 0.0;
      for (std::size_t i = 0; i < palette.size(); ++i) {
        if (groups[i] == g) s += std::min(1.0, k * norm_l(palette[i])) * norm_c(palette[i]) * weights[i];
      }
      return s;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (sum_at(hi) < target && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (sum_at(mid) < target ? lo : hi) = mid;
    }
    const double k = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < palette.size(); ++i) {
      if (groups[i] == g) out[i].L = std::min(1.0, k * norm_l(palette[i])) * kLightnessScale;
    }
  }
  return out;
}

}  // namespace

ContrastResult contrast_operator(const std::vector<Lch>& palette, const std::vector<double>& weights,
                                 ContrastKind kind, double beta) {
  check_weights(palette, weights);
  if (palette.empty()) throw Error("contrast: empty palette");
  ContrastResult res;
  auto fit_with = [&](const std::vector<TemplateKind>& kinds) {
    res.fit = select_optimal_template(palette, weights, kinds);
    res.axes = res.fit->tmpl.axes();
  };

  switch (kind) {
    case ContrastKind::hue:
      res.axes = {{red_hue(), AxisType::attract},
                  {green_hue(), AxisType::attract},
                  {blue_hue(), AxisType::attract}};
      break;
    case ContrastKind::light_dark:
    case ContrastKind::saturation:
      fit_with({TemplateKind::monochrome, TemplateKind::analogous});
      break;
    case ContrastKind::complementary:
    case ContrastKind::simultaneous:
      fit_with({TemplateKind::complementary});
      break;
    case ContrastKind::extension:
      fit_with({TemplateKind::complementary, TemplateKind::single_split, TemplateKind::triad,
                TemplateKind::double_split, TemplateKind::square});
      break;
    case ContrastKind::cold_warm: {
      res.axes = cold_warm_axes();
      TemplateFit f;
      f.tmpl = {TemplateKind::complementary, res.axes[0].angle, 0.0};
      f.distance = palette_template_distance(palette, weights, res.axes);
      res.fit = f;
      break;
    }
  }
  res.assignment = assign_axes(palette, res.axes);
  res.palette = harmonize_palette(palette, res.assignment, res.axes, beta);

  switch (kind) {
    case ContrastKind::light_dark:
    case ContrastKind::saturation: {
      const LcKind lk = kind == ContrastKind::light_dark ? LcKind::lc1 : LcKind::lc2;
      res.lc = fit_lc_template(res.palette, weights, lk);
      blend_lc(res.palette, apply_lc_template(res.palette, weights, lk, res.lc->epsilon).palette, beta);
      break;
    }
    case ContrastKind::simultaneous: {
      double w0 = 0.0, w1 = 0.0;
      for (std::size_t i = 0; i < palette.size(); ++i) {
        if (res.assignment[i].axis == 0) w0 += weights[i];
        if (res.assignment[i].axis == 1) w1 += weights[i];
      }
      const int weaker = w1 < w0 ? 1 : 0;
      const double scale = std::max(0.0, 1.0 - kSimultaneousChromaSlope * beta);
      for (std::size_t i = 0; i < palette.size(); ++i) {
        if (res.assignment[i].axis == weaker) res.palette[i].C *= scale;
      }
      break;
    }
    case ContrastKind::extension: {
      const TemplateKind tk = res.fit->tmpl.kind;
      const std::vector<int> groups = color_groups(tk, res.assignment);
      blend_lc(res.palette, equalize_extension(res.palette, weights, groups, group_count(tk)), beta);
      break;
    }
    default:
      break;
  }
  return res;
}

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
}

std::vector<Lch> to_lch(const std::vector<Rgb>& colors) {
  std::vector<Lch> out;
  out.reserve(colors.size());
  for (const auto& c : colors) out.push_back(rgb_to_lch(c));
  return out;
}

std::vector<Rgb> to_rgb(const std::vector<Lch>& colors) {
  std::vector<Rgb> out;
  out.reserve(colors.size());
  for (const auto& c : colors) out.push_back(lch_to_rgb(c).rgb);
  return out;
}

}  // namespace rgbxy
