#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

using rgbxy::LcKind;
using rgbxy::Lch;
using rgbxy::TemplateKind;

namespace oracle {

namespace {

// Dense tableau simplex, Bland's rule. Rows: constraints with slack-free
// equality form and one artificial variable each.
bool feasible_convex_combination(const std::vector<std::vector<double>>& cols,
                                 const std::vector<double>& target) {
  const std::size_t m = target.size() + 1;  // coordinates plus sum-to-one
  const std::size_t n = cols.size();
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  for (std::size_t r = 0; r < m; ++r) {
    double rhs = r + 1 < m ? target[r] : 1.0;
    const double sign = rhs < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t[r][j] = sign * (r + 1 < m ? cols[j][r] : 1.0);
    t[r][n + r] = 1.0;
    t[r][width - 1] = sign * rhs;
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;
  // Objective: minimize the sum of artificials, expressed in nonbasic terms.
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < width; ++j) {
      if (j < n || j == width - 1) t[m][j] -= t[r][j];
    }
  }
  const double eps = 1e-12;
  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      if (t[r][enter] > eps) {
        const double ratio = t[r][width - 1] / t[r][enter];
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave == m) break;
    const double piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = t[r][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) t[r][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  return -t[m][width - 1] < 1e-9;
}

double arc(double a, double b) {
  double x = std::fmod(std::abs(a - b), 360.0);
  return std::min(x, 360.0 - x);
}

int groups_of(TemplateKind k) {
  switch (k) {
    case TemplateKind::monochrome: return 1;
    case TemplateKind::complementary: return 2;
    case TemplateKind::single_split: return 3;
    case TemplateKind::triad: return 3;
    case TemplateKind::double_split: return 4;
    case TemplateKind::square: return 4;
    case TemplateKind::analogous: return 1;
  }
  return 1;
}

bool two_dof(TemplateKind k) {
  return k == TemplateKind::single_split || k == TemplateKind::double_split ||
         k == TemplateKind::analogous;
}

// Per-color nearest attract axis (lowest index on ties), or -1.
std::vector<int> nearest_axis(const std::vector<Lch>& p, const std::vector<double>& axes) {
  std::vector<int> out(p.size(), -1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].C < 1e-8) continue;
    double best = 1e300;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      const double d = arc(p[i].h, axes[j]);
      if (d < best) {
        best = d;
        out[i] = static_cast<int>(j);
      }
    }
  }
  return out;
}

}  // namespace

std::array<double, 3> srgb_to_lab(double r, double g, double b) {
  auto lin = [](double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); };
  const double R = lin(r), G = lin(g), B = lin(b);
  const double X = 0.4124564 * R + 0.3575761 * G + 0.1804375 * B;
  const double Y = 0.2126729 * R + 0.7151522 * G + 0.0721750 * B;
  const double Z = 0.0193339 * R + 0.1191920 * G + 0.9503041 * B;
  const double d = 6.0 / 29.0;
  auto f = [d](double t) { return t > d * d * d ? std::cbrt(t) : t / (3 * d * d) + 4.0 / 29.0; };
  const double fx = f(X / 0.95047), fy = f(Y / 1.0), fz = f(Z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double distance_to_convex_set(const std::vector<std::array<double, 3>>& pts, const std::array<double, 3>& p) {
  std::vector<std::vector<double>> cols;
  for (const auto& q : pts) cols.emplace_back(q.begin(), q.end());
  if (feasible_convex_combination(cols, {p[0], p[1], p[2]})) return 0.0;
  using V = Eigen::Vector3d;
  const V x(p[0], p[1], p[2]);
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<V>& s) {
    const int m = static_cast<int>(s.size()) - 1;
    V q = s[0];
    if (m > 0) {
      Eigen::MatrixXd e(3, m);
      for (int i = 0; i < m; ++i) e.col(i) = s[i + 1] - s[0];
      const Eigen::MatrixXd gram = e.transpose() * e;
      if (std::abs(gram.determinant()) < 1e-18) return;
      const Eigen::VectorXd t = gram.ldlt().solve(e.transpose() * (x - s[0]));
      if (t.minCoeff() < -1e-12 || t.sum() > 1.0 + 1e-12) return;
      q += e * t;
    }
    best = std::min(best, (q - x).norm());
  };
  const std::size_t n = pts.size();
  auto v = [&](std::size_t i) { return V(pts[i][0], pts[i][1], pts[i][2]); };
  for (std::size_t i = 0; i < n; ++i) {
    consider({v(i)});
    for (std::size_t j = i + 1; j < n; ++j) {
      consider({v(i), v(j)});
      for (std::size_t k = j + 1; k < n; ++k) consider({v(i), v(j), v(k)});
    }
  }
  return best;
}

bool lp_is_hull_vertex(const rgbxy::geom::PointSet& pts, std::size_t i) {
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j == i) continue;
    cols.emplace_back(pts[j].begin(), pts[j].end());
  }
  const std::vector<double> target(pts[i].begin(), pts[i].end());
  return !feasible_convex_combination(cols, target);
}

std::vector<double> axis_angles(TemplateKind kind, int a1, int a2) {
  const double s = 30.0 + a2;
  std::vector<double> v;
  switch (kind) {
    case TemplateKind::monochrome: v = {0}; break;
    case TemplateKind::complementary: v = {0, 180}; break;
    case TemplateKind::single_split: v = {0, 180 - s, 180 + s}; break;
    case TemplateKind::triad: v = {0, 120, 240}; break;
    case TemplateKind::double_split: v = {-s / 2, s / 2, 180 - s / 2, 180 + s / 2}; break;
    case TemplateKind::square: v = {0, 90, 180, 270}; break;
    case TemplateKind::analogous: v = {-s, s}; break;
  }
  for (auto& x : v) {
    x = std::fmod(x + a1 + 720.0, 360.0);
  }
  return v;
}

double template_distance(const std::vector<Lch>& p, const std::vector<double>& w, TemplateKind kind,
                         int a1, int a2) {
  const std::vector<double> axes = axis_angles(kind, a1, a2);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].C < 1e-8) continue;
    double d;
    if (kind == TemplateKind::analogous) {
      const double half = 30.0 + a2;
      d = arc(p[i].h, a1) <= half ? 0.0 : std::min(arc(p[i].h, axes[0]), arc(p[i].h, axes[1]));
    } else {
      d = 1e300;
      for (double ax : axes) d = std::min(d, arc(p[i].h, ax));
    }
    total += w[i] * (p[i].L / 100.0) * (p[i].C / 134.0) * d;
  }
  return total;
}

GridFit fit(const std::vector<Lch>& p, const std::vector<double>& w, TemplateKind kind) {
  const int lo = two_dof(kind) ? -15 : 0;
  const int hi = two_dof(kind) ? 15 : 0;
  double dmin = std::numeric_limits<double>::infinity();
  std::vector<GridFit> all;
  for (int a1 = 0; a1 < 360; ++a1) {
    for (int a2 = lo; a2 <= hi; ++a2) {
      const double d = template_distance(p, w, kind, a1, a2);
      all.push_back({a1, a2, d});
      dmin = std::min(dmin, d);
    }
  }
  const double tol = 1e-12 * std::max(1.0, dmin);
  for (const auto& g : all) {
    if (g.distance <= dmin + tol) return g;  // grid is visited in (a1, a2) order
  }
  return all.front();
}

Selection select(const std::vector<Lch>& p, const std::vector<double>& w) {
  Selection best;
  bool have = false;
  for (TemplateKind k : rgbxy::kAllTemplateKinds) {
    const GridFit g = fit(p, w, k);
    if (k != TemplateKind::monochrome) {
      std::vector<char> seen(groups_of(k), 0);
      const std::vector<int> near = nearest_axis(p, axis_angles(k, g.alpha1, g.alpha2));
      for (int a : near) {
        if (a >= 0) seen[k == TemplateKind::analogous ? 0 : a] = 1;
      }
      if (std::count(seen.begin(), seen.end(), 0) > 0) continue;
    }
    const double tol = 1e-12 * std::max(1.0, g.distance);
    if (!have || g.distance < best.fit.distance - tol ||
        (std::abs(g.distance - best.fit.distance) <= tol && groups_of(k) < groups_of(best.kind))) {
      best = {k, g};
      have = true;
    }
  }
  return best;
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-11) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double lc_epsilon(const std::vector<Lch>& p, const std::vector<double>& w, LcKind kind) {
  std::vector<double> xs, ys, ws;
  double wsum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = p[i].C / 134.0, y = p[i].L / 100.0;
    if ((y < 0.02 || y > 0.98) && x < 0.02) continue;
    xs.push_back(x);
    ys.push_back(y);
    ws.push_back(w[i]);
    wsum += w[i];
  }
  auto objective = [&](auto dist) {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] / wsum * dist(xs[i], ys[i]) * dist(xs[i], ys[i]);
    return s;
  };
  const double h = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case LcKind::lc1:
      return golden_section_min([&](double e) { return objective([&](double x, double) { return x - e; }); }, -3, 3);
    case LcKind::lc2:
      return golden_section_min([&](double e) { return objective([&](double, double y) { return y - e; }); }, -3, 3);
    case LcKind::lc5:
      return golden_section_min(
          [&](double e) { return objective([&](double x, double y) { return (x - y - e) * h; }); }, -3, 3);
    case LcKind::lc6:
      return golden_section_min(
          [&](double e) { return objective([&](double x, double y) { return (x + y - e) * h; }); }, -3, 3);
    case LcKind::lc3:
    case LcKind::lc4: {
      const double py = kind == LcKind::lc3 ? 0.0 : 1.0;
      double best = 1e300, arg = 0.0;
      for (int k = -900; k < 900; ++k) {
        const double a = k * 0.1 * M_PI / 180.0;
        const double v = objective([&](double x, double y) {
          return std::abs(-std::sin(a) * x + std::cos(a) * (y - py));
        });
        if (v < best) {
          best = v;
          arg = k * 0.1;
        }
      }
      return arg;
    }
  }
  return 0.0;
}

std::vector<Lch> random_palette(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Lch> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(rgbxy::rgb_to_lch({u(rng), u(rng), u(rng)}));
  return out;
}

std::vector<double> random_weights(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed ^ 0x5bd1e995u);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) s += (x = u(rng));
  for (auto& x : w) x /= s;
  return w;
}

}  // namespace oracle
