#include "rgbxy/geom/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rgbxy/error.hpp"

namespace rgbxy::geom {

namespace {

Vec sub(const Vec& a, const Vec& b) {
  Vec r{};
  for (int k = 0; k < 3; ++k) r[k] = a[k] - b[k];
  return r;
}

double dot3(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec lerp(const Vec& a, const Vec& d, double t) {
  Vec r{};
  for (int k = 0; k < 3; ++k) r[k] = a[k] + t * d[k];
  return r;
}

Vec load(std::span<const double> p, int dim) {
  Vec v{};
  for (int k = 0; k < dim; ++k) v[k] = p[k];
  return v;
}

}  // namespace

Vec closest_point_on_segment(const Vec& p, const Vec& a, const Vec& b, int dim) {
  double num = 0.0, den = 0.0;
  for (int k = 0; k < dim; ++k) {
    num += (p[k] - a[k]) * (b[k] - a[k]);
    den += (b[k] - a[k]) * (b[k] - a[k]);
  }
  const double t = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
  Vec r{};
  for (int k = 0; k < dim; ++k) r[k] = a[k] + t * (b[k] - a[k]);
  return r;
}

Vec closest_point_on_triangle(const Vec& p, const Vec& a, const Vec& b, const Vec& c) {
  const Vec ab = sub(b, a), ac = sub(c, a), ap = sub(p, a);
  const double d1 = dot3(ab, ap), d2 = dot3(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec bp = sub(p, b);
  const double d3 = dot3(ab, bp), d4 = dot3(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return lerp(a, ab, d1 / (d1 - d3));

  const Vec cp = sub(p, c);
  const double d5 = dot3(ab, cp), d6 = dot3(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return lerp(a, ac, d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return lerp(b, sub(c, b), (d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  Vec r{};
  for (int k = 0; k < 3; ++k) r[k] = a[k] + ab[k] * v + ac[k] * w;
  return r;
}

HullDistance distance_to_hull(const HullMesh& hull, std::span<const double> q) {
  const int d = hull.dim;
  if (d != 2 && d != 3) throw Error("distance_to_hull: only 2D and 3D hulls");
  HullDistance out;
  out.closest = load(q, d);
  if (hull.signed_distance(q) <= 0.0) return out;

  // A point on a flat face can sit a rounding error outside a coplanar
  // neighbor while its own facet reports it inside; keep near-zero facets.
  const double tol = 1e-12 * std::max(1.0, hull.vertices.max_abs());
  const Vec p = out.closest;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : hull.facets) {
    if (f.signed_distance(q, d) < -tol) continue;
    Vec c{};
    if (d == 3) {
      c = closest_point_on_triangle(p, load(hull.vertices[f.vertices[0]], 3),
                                    load(hull.vertices[f.vertices[1]], 3),
                                    load(hull.vertices[f.vertices[2]], 3));
    } else {
      c = closest_point_on_segment(p, load(hull.vertices[f.vertices[0]], 2),
                                   load(hull.vertices[f.vertices[1]], 2), 2);
    }
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += (c[k] - p[k]) * (c[k] - p[k]);
    if (s < best) {
      best = s;
      out.closest = c;
    }
  }
  out.distance = std::sqrt(best);
  return out;
}

}  // namespace rgbxy::geom
