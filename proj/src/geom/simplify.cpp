#include "rgbxy/geom/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "rgbxy/error.hpp"

namespace rgbxy::geom {

namespace {

struct Plane {
  std::array<double, 3> n{};
  double d = 0.0;
  double area = 0.0;
};

struct EdgeLp {
  bool feasible = false;
  Vec point{};
  double added = 0.0;
};

using Tri = std::array<std::array<double, 3>, 3>;
using LpCache = std::map<std::vector<double>, EdgeLp>;

std::array<double, 3> coords(const HullMesh& h, int v) {
  const auto p = h.vertices[v];
  return {p[0], p[1], p[2]};
}

// Plane through a facet with vertex coordinates in a canonical order, so the
// result depends only on the facet's geometry.
Plane facet_plane(const Tri& t, const HullFacet& f) {
  const auto& a = t[0];
  const auto& b = t[1];
  const auto& c = t[2];
  const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const double w[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  std::array<double, 3> n = {u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2],
                             u[0] * w[1] - u[1] * w[0]};
  const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  Plane p;
  p.area = 0.5 * len;
  if (len == 0.0) return p;
  for (auto& x : n) x /= len;
  if (n[0] * f.normal[0] + n[1] * f.normal[1] + n[2] * f.normal[2] < 0.0) {
    for (auto& x : n) x = -x;
  }
  p.n = n;
  p.d = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
  return p;
}

// The feasible region is a pointed polyhedron (the incident normals of a
// hull vertex span R^3) and the objective is bounded below by zero, so the
// optimum sits at a vertex: enumerate all plane triples.
EdgeLp solve_edge_lp(const std::vector<Plane>& planes) {
  EdgeLp best;
  best.added = std::numeric_limits<double>::infinity();
  const std::size_t m = planes.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        const auto& a = planes[i].n;
        const auto& b = planes[j].n;
        const auto& c = planes[k].n;
        const double bxc[3] = {b[1] * c[2] - b[2] * c[1], b[2] * c[0] - b[0] * c[2],
                               b[0] * c[1] - b[1] * c[0]};
        const double det = a[0] * bxc[0] + a[1] * bxc[1] + a[2] * bxc[2];
        if (std::abs(det) < 1e-12) continue;
        const double cxa[3] = {c[1] * a[2] - c[2] * a[1], c[2] * a[0] - c[0] * a[2],
                               c[0] * a[1] - c[1] * a[0]};
        const double axb[3] = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                               a[0] * b[1] - a[1] * b[0]};
        Vec v{};
        for (int r = 0; r < 3; ++r) {
          v[r] = (planes[i].d * bxc[r] + planes[j].d * cxa[r] + planes[k].d * axb[r]) / det;
        }
        const double scale = std::max({1.0, std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
        const double tol = 1e-10 * scale;
        bool ok = true;
        double added = 0.0;
        for (const auto& p : planes) {
          const double s = p.n[0] * v[0] + p.n[1] * v[1] + p.n[2] * v[2] - p.d;
          if (s < -tol) {
            ok = false;
            break;
          }
          added += p.area * std::max(s, 0.0);
        }
        if (!ok) continue;
        added /= 3.0;
        if (added < best.added) {
          best.feasible = true;
          best.added = added;
          best.point = v;
        }
      }
    }
  }
  return best;
}

std::optional<EdgeCollapse> cheapest_collapse_cached(const HullMesh& hull, LpCache& cache,
                                                     LpCache& next_cache) {
  if (hull.dim != 3) throw Error("simplify: hull must be 3D");
  const std::size_t nv = hull.vertex_count();
  std::vector<std::vector<int>> incident(nv);
  std::vector<std::pair<int, int>> edges;
  std::vector<Tri> tris(hull.facets.size());
  for (std::size_t f = 0; f < hull.facets.size(); ++f) {
    const auto& fv = hull.facets[f].vertices;
    for (int k = 0; k < 3; ++k) {
      incident[fv[k]].push_back(static_cast<int>(f));
      tris[f][k] = coords(hull, fv[k]);
      const int a = fv[k], b = fv[(k + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(tris[f].begin(), tris[f].end());
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::optional<EdgeCollapse> best;
  std::vector<int> faces;
  std::vector<Tri> face_tris;
  for (const auto& [a, b] : edges) {
    faces.clear();
    faces.insert(faces.end(), incident[a].begin(), incident[a].end());
    faces.insert(faces.end(), incident[b].begin(), incident[b].end());
    std::sort(faces.begin(), faces.end());
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());

    face_tris.clear();
    for (int f : faces) face_tris.push_back(tris[f]);
    std::vector<int> order(faces.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return face_tris[x] < face_tris[y]; });

    std::vector<double> key;
    key.reserve(6 + 9 * faces.size());
    auto ca = coords(hull, a), cb = coords(hull, b);
    if (cb < ca) std::swap(ca, cb);
    key.insert(key.end(), ca.begin(), ca.end());
    key.insert(key.end(), cb.begin(), cb.end());
    for (int o : order) {
      for (const auto& p : face_tris[o]) key.insert(key.end(), p.begin(), p.end());
    }

    EdgeLp lp;
    if (auto it = cache.find(key); it != cache.end()) {
      lp = it->second;
    } else if (auto it2 = next_cache.find(key); it2 != next_cache.end()) {
      lp = it2->second;
    } else {
      std::vector<Plane> planes;
      planes.reserve(faces.size());
      for (int o : order) {
        const Plane p = facet_plane(face_tris[o], hull.facets[faces[o]]);
        if (p.area > 0.0) planes.push_back(p);
      }
      lp = solve_edge_lp(planes);
    }
    next_cache.emplace(std::move(key), lp);

    if (!lp.feasible) continue;
    if (!best || lp.added < best->added_volume) {
      best = EdgeCollapse{a, b, lp.point, lp.added};
    }
  }
  return best;
}

}  // namespace

std::optional<EdgeCollapse> cheapest_collapse(const HullMesh& hull) {
  LpCache cache, next;
  return cheapest_collapse_cached(hull, cache, next);
}

std::vector<HullMesh> simplify_hull(const HullMesh& hull,
                                    const std::function<bool(const HullMesh&)>& stop) {
  std::vector<HullMesh> seq{hull};
  LpCache cache;
  while (seq.back().vertex_count() > 4) {
    const HullMesh& cur = seq.back();
    LpCache next;
    const auto col = cheapest_collapse_cached(cur, cache, next);
    cache = std::move(next);
    if (!col) break;

    PointSet pts(3);
    pts.reserve(cur.vertex_count() - 1);
    for (std::size_t v = 0; v < cur.vertex_count(); ++v) {
      if (static_cast<int>(v) == col->a || static_cast<int>(v) == col->b) continue;
      pts.push_back(cur.vertices[v]);
    }
    pts.push_back(std::span<const double>(col->point.data(), 3));
    HullMesh cand;
    try {
      cand = convex_hull(pts);
    } catch (const DegenerateInput&) {
      break;
    }
    if (stop && stop(cand)) break;
    seq.push_back(std::move(cand));
  }
  return seq;
}

}  // namespace rgbxy::geom
