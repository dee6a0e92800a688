#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rgbxy/error.hpp"
#include "rgbxy/harmony.hpp"

using namespace rgbxy;

namespace {

std::vector<double> angles(const std::vector<Axis>& axes) {
  std::vector<double> out;
  for (const auto& a : axes) out.push_back(a.angle);
  return out;
}

Lch chroma_at(double h, double L = 60.0, double C = 50.0) { return {L, C, h}; }

}  // namespace

TEST_CASE("template axes follow the canonical geometry") {
  CHECK(angles(template_axes(TemplateKind::triad, 0)) == std::vector<double>{0, 120, 240});
  CHECK(angles(template_axes(TemplateKind::complementary, 30)) == std::vector<double>{30, 210});
  CHECK(angles(template_axes(TemplateKind::square, 10)) == std::vector<double>{10, 100, 190, 280});
  CHECK(angles(template_axes(TemplateKind::single_split, 0, 0)) == std::vector<double>{0, 150, 210});
  CHECK(angles(template_axes(TemplateKind::double_split, 0, 10)) == std::vector<double>{340, 20, 160, 200});
  const auto an = template_axes(TemplateKind::analogous, 5, -5);
  CHECK(angles(an) == std::vector<double>{340, 30});
  CHECK(an[0].type == AxisType::sector_bound);
  CHECK_THROWS_AS(template_axes(TemplateKind::analogous, 0, 16), InvalidAngle);
  CHECK_THROWS_AS(template_axes(TemplateKind::triad, 0, 3), InvalidAngle);
  CHECK_THROWS_AS(template_axes(TemplateKind::triad, NAN), InvalidAngle);
}

TEST_CASE("palette/template distance") {
  const std::vector<Lch> on = {chroma_at(10), chroma_at(190)};
  CHECK(palette_template_distance(on, {0.5, 0.5}, template_axes(TemplateKind::complementary, 10)) == 0.0);

  const Lch c = chroma_at(60, 70, 40);
  const double k = 0.7 * (40.0 / 134.0);
  CHECK(palette_template_distance({c}, {1.0}, template_axes(TemplateKind::monochrome, 30)) ==
        doctest::Approx(k * 30).epsilon(1e-12));

  // Inside the analogous sector costs nothing; outside measures to the bound.
  const auto an = template_axes(TemplateKind::analogous, 100, 0);
  CHECK(palette_template_distance({chroma_at(120)}, {1.0}, an) == 0.0);
  CHECK(palette_template_distance({chroma_at(140)}, {1.0}, an) ==
        doctest::Approx(0.6 * 50.0 / 134.0 * 10.0));

  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto p = oracle::random_palette(6, seed);
    const auto w = oracle::random_weights(6, seed);
    for (TemplateKind kind : kAllTemplateKinds) {
      const int a2 = has_alpha2(kind) ? static_cast<int>(seed % 31) - 15 : 0;
      const double got = palette_template_distance(p, w, template_axes(kind, seed * 17 % 360, a2));
      const double want = oracle::template_distance(p, w, kind, seed * 17 % 360, a2);
      CHECK(std::abs(got - want) <= 1e-12);
    }
  }
}

TEST_CASE("achromatic colors carry no hue") {
  const std::vector<Lch> p = {{50.0, 0.0, 0.0}, chroma_at(200)};
  const auto a = assign_axes(p, template_axes(TemplateKind::monochrome, 0));
  CHECK(a[0].axis == -1);
  CHECK(a[1].axis == 0);
  const auto h = harmonize_palette(p, HarmonicTemplate{TemplateKind::monochrome, 0, 0}, 1.0);
  CHECK(h[0] == p[0]);
}

TEST_CASE("fit examples") {
  const auto mono = fit_template({chroma_at(137)}, {1.0}, TemplateKind::monochrome);
  CHECK(mono.tmpl.alpha1 == 137);
  CHECK(mono.distance == 0.0);

  const auto comp = fit_template({chroma_at(10), chroma_at(190)}, {0.5, 0.5}, TemplateKind::complementary);
  CHECK(comp.tmpl.alpha1 == 10);
  CHECK(comp.distance == 0.0);
}

TEST_CASE("fit matches the exhaustive grid oracle") {
  for (unsigned seed = 100; seed < 130; ++seed) {
    const std::size_t n = 2 + seed % 7;
    const auto p = oracle::random_palette(n, seed);
    const auto w = oracle::random_weights(n, seed);
    for (TemplateKind kind : kAllTemplateKinds) {
      const TemplateFit f = fit_template(p, w, kind);
      const oracle::GridFit g = oracle::fit(p, w, kind);
      INFO("seed " << seed << " kind " << to_string(kind));
      CHECK(f.tmpl.alpha1 == g.alpha1);
      CHECK(f.tmpl.alpha2 == g.alpha2);
      CHECK(std::abs(f.distance - g.distance) <= 1e-12);
    }
  }
}

TEST_CASE("fit is invariant to positive weight scaling") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto p = oracle::random_palette(5, seed);
    auto w = oracle::random_weights(5, seed);
    const TemplateFit a = select_optimal_template(p, w);
    for (auto& x : w) x *= 37.5;
    const TemplateFit b = select_optimal_template(p, w);
    CHECK(a.tmpl.kind == b.tmpl.kind);
    CHECK(a.tmpl.alpha1 == b.tmpl.alpha1);
    CHECK(a.tmpl.alpha2 == b.tmpl.alpha2);
  }
}

TEST_CASE("optimal template selection") {
  const auto tri = select_optimal_template({chroma_at(0), chroma_at(120), chroma_at(240)},
                                           uniform_weights(3));
  CHECK(tri.tmpl.kind == TemplateKind::triad);
  CHECK(tri.distance == 0.0);

  const auto one = select_optimal_template({chroma_at(77)}, {1.0});
  CHECK(one.tmpl.kind == TemplateKind::monochrome);

  // Only achromatic colors: monochrome still qualifies.
  const auto grey = select_optimal_template({{40.0, 0.0, 0.0}}, {1.0});
  CHECK(grey.tmpl.kind == TemplateKind::monochrome);

  CHECK_THROWS_AS(select_optimal_template({chroma_at(10), chroma_at(50)}, {0.5, 0.5},
                                          {TemplateKind::square}),
                  NoValidTemplate);

  for (unsigned seed = 200; seed < 220; ++seed) {
    const std::size_t n = 3 + seed % 6;
    const auto p = oracle::random_palette(n, seed);
    const auto w = oracle::random_weights(n, seed);
    const TemplateFit f = select_optimal_template(p, w);
    const oracle::Selection s = oracle::select(p, w);
    INFO("seed " << seed);
    CHECK(f.tmpl.kind == s.kind);
    CHECK(f.tmpl.alpha1 == s.fit.alpha1);
    CHECK(f.tmpl.alpha2 == s.fit.alpha2);
  }
}

TEST_CASE("harmonization moves hue only") {
  for (unsigned seed = 0; seed < 30; ++seed) {
    const auto p = oracle::random_palette(6, seed);
    const auto w = oracle::random_weights(6, seed);
    for (TemplateKind kind : kAllTemplateKinds) {
      const TemplateFit f = fit_template(p, w, kind);
      const auto axes = f.tmpl.axes();
      const auto a = assign_axes(p, axes);
      const auto h0 = harmonize_palette(p, a, axes, 0.0);
      const auto h1 = harmonize_palette(p, a, axes, 1.0);
      const auto hh = harmonize_palette(p, a, axes, 0.5);
      const auto h15 = harmonize_palette(p, a, axes, 1.5);
      for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(h0[i] == p[i]);
        for (const auto* h : {&h1, &hh, &h15}) {
          CHECK((*h)[i].L == p[i].L);
          CHECK((*h)[i].C == p[i].C);
        }
        if (a[i].axis < 0 || a[i].in_sector) {
          CHECK(h1[i].h == p[i].h);
          continue;
        }
        CHECK(hue_arc_distance(h1[i].h, axes[a[i].axis].angle) < 1e-9);
        // Linear in beta along the shortest arc.
        const double full = signed_hue_delta(p[i].h, h1[i].h);
        CHECK(hue_arc_distance(hh[i].h, p[i].h + 0.5 * full) < 1e-9);
        CHECK(hue_arc_distance(h15[i].h, p[i].h + 1.5 * full) < 1e-9);
      }
    }
  }
}

TEST_CASE("LC closed forms match numeric minimization") {
  for (unsigned seed = 0; seed < 40; ++seed) {
    const auto p = oracle::random_palette(3 + seed % 6, seed);
    const auto w = oracle::random_weights(p.size(), seed);
    for (LcKind k : {LcKind::lc1, LcKind::lc2, LcKind::lc5, LcKind::lc6}) {
      CHECK(std::abs(fit_lc_template(p, w, k).epsilon - oracle::lc_epsilon(p, w, k)) < 1e-6);
    }
    for (LcKind k : {LcKind::lc3, LcKind::lc4}) {
      CHECK(std::abs(fit_lc_template(p, w, k).epsilon - oracle::lc_epsilon(p, w, k)) <= 1.0);
    }
  }
}

TEST_CASE("LC fit examples") {
  const double c = 0.3;
  const std::vector<Lch> vertical = {{20, c * 134, 10}, {50, c * 134, 40}, {80, c * 134, 70}};
  CHECK(fit_lc_template(vertical, uniform_weights(3), LcKind::lc1).epsilon == doctest::Approx(c));

  // Colors on C - L - d = 0.
  const double d = 0.1;
  std::vector<Lch> diag;
  for (double l : {0.2, 0.4, 0.7}) diag.push_back({l * 100, (l + d) * 134, 30});
  CHECK(fit_lc_template(diag, uniform_weights(3), LcKind::lc5).epsilon == doctest::Approx(d));
}

TEST_CASE("LC application lies on the line with even spacing") {
  for (unsigned seed = 0; seed < 40; ++seed) {
    const auto p = oracle::random_palette(3 + seed % 6, seed);
    const auto w = oracle::random_weights(p.size(), seed);
    for (int ki = 1; ki <= 6; ++ki) {
      const auto kind = static_cast<LcKind>(ki);
      const LcFit f = fit_lc_template(p, w, kind);
      const LcResult r = apply_lc_template(p, w, kind, f.epsilon);
      const LcLine line = lc_line(kind, f.epsilon);
      std::vector<double> ts;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (!r.moved[i]) {
          CHECK(r.palette[i] == p[i]);
          continue;
        }
        const double dc = r.points[i].c - line.origin.c;
        const double dl = r.points[i].l - line.origin.l;
        CHECK(std::abs(dc * line.dir.l - dl * line.dir.c) < 1e-9);
        CHECK(r.palette[i].h == p[i].h);
        ts.push_back(dc * line.dir.c + dl * line.dir.l);
      }
      std::sort(ts.begin(), ts.end());
      for (std::size_t k = 2; k < ts.size(); ++k) {
        CHECK(std::abs((ts[k] - ts[k - 1]) - (ts[1] - ts[0])) < 1e-9);
      }
    }
  }
}

TEST_CASE("LC application examples") {
  // Two colors keep their own projections.
  const std::vector<Lch> two = {{30, 40, 10}, {70, 20, 10}};
  LcOptions nosnap;
  nosnap.neutral_snap = false;
  const LcFit f = fit_lc_template(two, uniform_weights(2), LcKind::lc1);
  const LcResult r = apply_lc_template(two, uniform_weights(2), LcKind::lc1, f.epsilon, {}, nosnap);
  CHECK(r.palette[0].L == doctest::Approx(30));
  CHECK(r.palette[1].L == doctest::Approx(70));
  CHECK(r.palette[0].C == doctest::Approx(f.epsilon * 134));

  // Evenly spaced colinear colors only shift by the neutral snap.
  std::vector<Lch> four;
  for (double l : {0.1, 0.3, 0.5, 0.7}) four.push_back({l * 100, 0.2 * 134, 50});
  const LcResult s = apply_lc_template(four, uniform_weights(4), LcKind::lc1, 0.2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(s.palette[i].L == doctest::Approx(four[i].L));
  std::vector<Lch> shifted = four;
  for (auto& c : shifted) c.L += 8;  // 0.58 is closest to 0.5
  const LcResult t = apply_lc_template(shifted, uniform_weights(4), LcKind::lc1, 0.2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(t.palette[i].L == doctest::Approx(four[i].L));

  // Pure black and white stay out.
  const std::vector<Lch> bw = {{0.5, 0.1, 0}, {99.5, 0.1, 0}, {40, 30, 20}, {60, 50, 20}};
  const LcResult u = apply_lc_template(bw, uniform_weights(4), LcKind::lc2, 0.5);
  CHECK(u.palette[0] == bw[0]);
  CHECK(u.palette[1] == bw[1]);
  CHECK(!u.moved[0]);
}

TEST_CASE("per-axis LC groups pivot at the neutral point") {
  const std::vector<Lch> p = {{30, 20, 10}, {60, 40, 10}, {40, 30, 190}, {80, 10, 190}};
  const LcResult r = apply_lc_template(p, uniform_weights(4), LcKind::lc3, 0.0, {0, 0, 1, 1},
                                       LcOptions{false});
  for (int g = 0; g < 2; ++g) {
    const auto& a = r.points[2 * g];
    const auto& b = r.points[2 * g + 1];
    // Both points of a group are colinear with (C=0, L=0.5).
    const double cross = (a.c - 0.0) * (b.l - 0.5) - (a.l - 0.5) * (b.c - 0.0);
    CHECK(std::abs(cross) < 1e-12);
  }
}

TEST_CASE("contrast operators") {
  const std::vector<Lch> prim = {rgb_to_lch({1, 0, 0}), rgb_to_lch({0, 1, 0}), rgb_to_lch({0, 0, 1})};
  const auto hue = contrast_operator(prim, uniform_weights(3), ContrastKind::hue, 1.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(hue.palette[i].h == doctest::Approx(prim[i].h).epsilon(1e-12));

  const auto cw = cold_warm_axes();
  CHECK(hue_arc_distance(cw[0].angle, cw[1].angle) == doctest::Approx(180));
  const double divide = normalize_hue(cw[0].angle - 90);
  CHECK(hue_arc_distance(divide, red_hue()) == doctest::Approx(hue_arc_distance(divide + 180, cyan_hue())));

  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto p = oracle::random_palette(6, seed + 50);
    const auto w = oracle::random_weights(6, seed + 50);
    for (int k = 0; k <= static_cast<int>(ContrastKind::cold_warm); ++k) {
      const auto kind = static_cast<ContrastKind>(k);
      ContrastResult zero;
      try {
        zero = contrast_operator(p, w, kind, 0.0);
      } catch (const NoValidTemplate&) {
        continue;
      }
      for (std::size_t i = 0; i < p.size(); ++i) CHECK(zero.palette[i] == p[i]);
    }
  }
}

TEST_CASE("extension equalizes L*C*W across axes") {
  int checked = 0;
  for (unsigned seed = 0; seed < 40; ++seed) {
    const auto p = oracle::random_palette(6, seed + 300);
    const auto w = oracle::random_weights(6, seed + 300);
    ContrastResult r;
    try {
      r = contrast_operator(p, w, ContrastKind::extension, 1.0);
    } catch (const NoValidTemplate&) {
      continue;
    }
    const TemplateKind tk = r.fit->tmpl.kind;
    const auto groups = color_groups(tk, r.assignment);
    const auto sums = extension_sums(r.palette, w, groups, group_count(tk));
    const auto before = extension_sums(p, w, groups, group_count(tk));
    std::vector<double> active;
    for (std::size_t g = 0; g < sums.size(); ++g) {
      if (before[g] > 0) active.push_back(sums[g]);
    }
    for (double s : active) CHECK(std::abs(s - active.front()) < 1e-6);
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("simultaneous contrast halves the weaker axis chroma at beta 1") {
  const std::vector<Lch> p = {{50, 60, 20}, {50, 60, 200}, {60, 30, 205}};
  const std::vector<double> w = {0.6, 0.1, 0.3};
  const auto r = contrast_operator(p, w, ContrastKind::simultaneous, 1.0);
  // Axis holding colors 1 and 2 weighs 0.4 < 0.6.
  CHECK(r.palette[0].C == p[0].C);
  CHECK(r.palette[1].C == doctest::Approx(30));
  CHECK(r.palette[2].C == doctest::Approx(15));
}
