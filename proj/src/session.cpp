#include "rgbxy/session.hpp"

#include "rgbxy/error.hpp"

namespace rgbxy {

using nlohmann::json;

std::string_view to_string(TransferMode m) { return m == TransferMode::align ? "align" : "transfer"; }

TransferMode transfer_mode_from_string(std::string_view s) {
  if (s == "align") return TransferMode::align;
  if (s == "transfer") return TransferMode::transfer;
  throw Error("unknown transfer mode: " + std::string(s));
}

json colors_json(const Palette& p) {
  json out = json::array();
  for (const Rgb& c : p.colors) out.push_back({c.r, c.g, c.b});
  return out;
}

Palette palette_from_colors_json(const json& colors) {
  return palette_from_json(json{{"colors", colors}}.dump());
}

json template_descriptor(const HarmonicTemplate& t, double beta) {
  return {{"kind", std::string(to_string(t.kind))}, {"alpha1", t.alpha1}, {"alpha2", t.alpha2}, {"beta", beta}};
}

json lc_descriptor(const LcFit& fit) {
  return {{"kind", std::string(to_string(fit.kind))}, {"epsilon", fit.epsilon}};
}

Palette apply_lch(const Palette& p, const std::vector<Lch>& before, const std::vector<Lch>& after) {
  Palette out = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(after[i] == before[i])) out.colors[i] = lch_to_rgb(after[i]).rgb;
  }
  return out;
}

TemplateFit fit_palette(const Palette& p, const std::vector<double>& weights,
                        const std::vector<TemplateKind>& kinds) {
  const std::vector<Lch> lch = to_lch(p.colors);
  if (kinds.size() == 1) return fit_template(lch, weights, kinds.front());
  return select_optimal_template(lch, weights, kinds);
}

PaletteEdit harmonize_edit(const Palette& p, const std::vector<double>& weights, const HarmonizeSpec& spec) {
  const PaletteHarmonization h = harmonize_rgb_palette(p, weights, spec);
  json r;
  r["template"] = template_descriptor(h.fit.tmpl, spec.beta);
  r["D"] = h.fit.distance;
  r["weights"] = weights;
  r["palette_in"] = colors_json(p);
  r["palette_out"] = colors_json(h.palette);
  return {h.palette, std::move(r)};
}

PaletteEdit lc_edit(const Palette& p, const std::vector<double>& weights, std::optional<LcKind> kind,
                    bool per_axis) {
  const std::vector<Lch> lch = to_lch(p.colors);
  const LcFit fit = kind ? fit_lc_template(lch, weights, *kind) : select_optimal_lc_template(lch, weights);
  std::vector<int> groups;
  json r;
  if (per_axis) {
    const TemplateFit hue = select_optimal_template(lch, weights);
    groups = color_groups(hue.tmpl.kind, assign_axes(lch, hue.tmpl.axes()));
    // Achromatic colors have no hue axis; they form one extra group.
    const int greys = group_count(hue.tmpl.kind);
    for (int& g : groups) {
      if (g < 0) g = greys;
    }
    r["hue_template"] = template_descriptor(hue.tmpl, 1.0);
  }
  const LcResult res = apply_lc_template(lch, weights, fit.kind, fit.epsilon, groups);
  const Palette out = apply_lch(p, lch, res.palette);
  r["template"] = lc_descriptor(fit);
  r["objective"] = fit.objective;
  r["weights"] = weights;
  r["palette_in"] = colors_json(p);
  r["palette_out"] = colors_json(out);
  return {out, std::move(r)};
}

PaletteEdit contrast_edit(const Palette& p, const std::vector<double>& weights, ContrastKind kind,
                          double beta) {
  const std::vector<Lch> lch = to_lch(p.colors);
  const ContrastResult res = contrast_operator(lch, weights, kind, beta);
  const Palette out = apply_lch(p, lch, res.palette);
  json r;
  r["contrast"] = {{"kind", std::string(to_string(kind))}, {"beta", beta}};
  if (res.fit) {
    r["template"] = template_descriptor(res.fit->tmpl, beta);
    r["D"] = res.fit->distance;
  }
  if (res.lc) r["lc"] = lc_descriptor(*res.lc);
  r["weights"] = weights;
  r["palette_in"] = colors_json(p);
  r["palette_out"] = colors_json(out);
  return {out, std::move(r)};
}

PaletteEdit transfer_edit(const Palette& p, const std::vector<double>& weights, const Palette& ref,
                          const std::vector<double>& ref_weights, TransferMode mode) {
  const std::vector<Lch> lch = to_lch(p.colors);
  const std::vector<Lch> ref_lch = to_lch(ref.colors);
  const TransferResult res = mode == TransferMode::align ? template_align(lch, weights, ref_lch, ref_weights)
                                                         : template_transfer(lch, weights, ref_lch, ref_weights);
  const Palette out = apply_lch(p, lch, res.palette);
  json r;
  r["mode"] = std::string(to_string(mode));
  r["template"] = template_descriptor(res.reference_fit.tmpl, 1.0);
  r["D"] = res.reference_fit.distance;
  if (mode == TransferMode::align) {
    r["input_template"] = template_descriptor(res.input_fit.tmpl, 1.0);
    r["gamma"] = res.gamma;
  }
  r["weights"] = weights;
  r["palette_in"] = colors_json(p);
  r["palette_out"] = colors_json(out);
  return {out, std::move(r)};
}

EditSession::EditSession(Image img, DecompositionState state) : image_(std::move(img)), state_(std::move(state)) {
  if (state_.width != image_.width() || state_.height != image_.height()) {
    throw Error("session: cached state does not match the image size");
  }
}

PaletteReport EditSession::auto_palette(const PaletteOptions& opts) {
  PaletteReport rep = extract_palette_report(image_, opts);
  set_palette(rep.palette);
  return rep;
}

void EditSession::set_palette(Palette p) {
  if (p.size() == 0) throw Error("session: empty palette");
  weights_ = relayer(state_, p);
  base_ = p;
  shown_ = std::move(p);
}

void EditSession::show(Palette p) {
  if (p.size() != base_.size()) throw Error("session: recolored palette changes the color count");
  shown_ = std::move(p);
}

Image EditSession::render() const {
  if (base_.size() == 0) throw Error("session: no palette");
  return reconstruct(weights_, shown_, image_.width(), image_.height());
}

std::vector<Rgba8Image> EditSession::layers() const {
  if (base_.size() == 0) throw Error("session: no palette");
  return export_layers(weights_, shown_, image_.width(), image_.height());
}

}  // namespace rgbxy
