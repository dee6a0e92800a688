#include "rgbxy/transfer.hpp"

#include <algorithm>
#include <numeric>

#include "rgbxy/error.hpp"

namespace rgbxy {

namespace {

double weighted_mean(const std::vector<Lch>& p, const std::vector<double>& w, double Lch::*field) {
  if (w.size() != p.size()) throw Error("transfer: one weight per color required");
  double ws = std::accumulate(w.begin(), w.end(), 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (ws > 0.0 ? w[i] : 1.0) * (p[i].*field);
  if (!(ws > 0.0)) ws = static_cast<double>(p.size());
  return ws > 0.0 ? s / ws : 0.0;
}

std::vector<Lch> clamp_ranges(std::vector<Lch> p) {
  for (auto& c : p) {
    c.L = std::clamp(c.L, 0.0, kLightnessScale);
    c.C = std::max(c.C, 0.0);
  }
  return p;
}

}  // namespace

double weighted_mean_l(const std::vector<Lch>& p, const std::vector<double>& w) {
  return weighted_mean(p, w, &Lch::L);
}

double weighted_mean_c(const std::vector<Lch>& p, const std::vector<double>& w) {
  return weighted_mean(p, w, &Lch::C);
}

std::vector<double> group_hues(const HarmonicTemplate& t) {
  if (t.kind == TemplateKind::analogous) return {normalize_hue(t.alpha1)};
  std::vector<double> h;
  for (const auto& a : t.axes()) h.push_back(a.angle);
  return h;
}

int main_axis(const std::vector<Lch>& palette, const std::vector<double>& weights,
              const HarmonicTemplate& t) {
  const auto groups = color_groups(t.kind, assign_axes(palette, t.axes()));
  const int n = group_count(t.kind);
  std::vector<double> w(n, 0.0), c(n, 0.0);
  for (std::size_t i = 0; i < palette.size(); ++i) {
    if (groups[i] < 0) continue;
    w[groups[i]] += weights[i];
    c[groups[i]] += palette[i].C;
  }
  int best = 0;
  for (int g = 1; g < n; ++g) {
    if (w[g] > w[best] || (w[g] == w[best] && c[g] > c[best])) best = g;
  }
  return best;
}

TransferResult template_align(const std::vector<Lch>& input, const std::vector<double>& input_w,
                              const std::vector<Lch>& reference, const std::vector<double>& reference_w) {
  if (input.empty() || reference.empty()) throw Error("transfer: empty palette");
  TransferResult r;
  r.input_fit = select_optimal_template(input, input_w);
  r.reference_fit = select_optimal_template(reference, reference_w);
  const double hi = group_hues(r.input_fit.tmpl)[main_axis(input, input_w, r.input_fit.tmpl)];
  const double hr =
      group_hues(r.reference_fit.tmpl)[main_axis(reference, reference_w, r.reference_fit.tmpl)];
  r.gamma = signed_hue_delta(hi, hr);
  std::vector<Lch> rotated = input;
  for (auto& c : rotated) {
    if (!is_achromatic(c)) c.h = normalize_hue(c.h + r.gamma);
  }
  r.unclamped = harmonize_palette(rotated, r.reference_fit.tmpl, 1.0);
  r.palette = clamp_ranges(r.unclamped);
  return r;
}

TransferResult template_transfer(const std::vector<Lch>& input, const std::vector<double>& input_w,
                                 const std::vector<Lch>& reference, const std::vector<double>& reference_w) {
  if (input.empty() || reference.empty()) throw Error("transfer: empty palette");
  TransferResult r;
  r.reference_fit = select_optimal_template(reference, reference_w);
  std::vector<Lch> out = harmonize_palette(input, r.reference_fit.tmpl, 1.0);
  const double li = weighted_mean_l(out, input_w);
  const double ci = weighted_mean_c(out, input_w);
  const double lr = weighted_mean_l(reference, reference_w);
  const double cr = weighted_mean_c(reference, reference_w);
  const double ls = li > 0.0 ? lr / li : 1.0;
  const double cs = ci > 0.0 ? cr / ci : 1.0;
  for (auto& c : out) {
    c.L *= ls;
    c.C *= cs;
  }
  r.unclamped = out;
  r.palette = clamp_ranges(std::move(out));
  return r;
}

}  // namespace rgbxy
