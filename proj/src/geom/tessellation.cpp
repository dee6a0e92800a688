#include "rgbxy/geom/tessellation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rgbxy/error.hpp"
#include "rgbxy/geom/linalg.hpp"

namespace rgbxy::geom {

SimplicialTessellation::SimplicialTessellation(PointSet vertices,
                                               std::vector<SimplexIndices> simplices,
                                               std::vector<SimplexIndices> neighbors)
    : dim_(vertices.dim()),
      vertices_(std::move(vertices)),
      simplices_(std::move(simplices)),
      neighbors_(std::move(neighbors)) {
  if (dim_ >= kMaxDim) throw Error("tessellation: dimension too large");
  const int d = dim_;
  inverse_.assign(simplices_.size() * d * d, 0.0);
  det_.assign(simplices_.size(), 0.0);
  for (std::size_t s = 0; s < simplices_.size(); ++s) {
    const auto last = vertices_[simplices_[s][d]];
    SmallMatrix m{};
    for (int c = 0; c < d; ++c) {
      const auto v = vertices_[simplices_[s][c]];
      for (int r = 0; r < d; ++r) m[r * d + c] = v[r] - last[r];
    }
    SmallMatrix inv{};
    double det = 0.0;
    if (invert(m, d, inv, &det)) {
      std::copy(inv.begin(), inv.begin() + d * d, inverse_.begin() + s * d * d);
      det_[s] = det;
    }
  }
}

double SimplicialTessellation::volume(std::size_t s) const {
  return std::abs(det_[s]) / factorial(dim_);
}

double SimplicialTessellation::total_volume() const {
  double v = 0.0;
  for (std::size_t s = 0; s < simplices_.size(); ++s) v += volume(s);
  return v;
}

void SimplicialTessellation::barycentric(std::size_t s, std::span<const double> q,
                                         double* out) const {
  const int d = dim_;
  const auto last = vertices_[simplices_[s][d]];
  const double* inv = inverse_.data() + s * d * d;
  Vec rel{};
  for (int k = 0; k < d; ++k) rel[k] = q[k] - last[k];
  double sum = 0.0;
  for (int r = 0; r < d; ++r) {
    double v = 0.0;
    for (int c = 0; c < d; ++c) v += inv[r * d + c] * rel[c];
    out[r] = v;
    sum += v;
  }
  out[d] = 1.0 - sum;
}

PointLocator::PointLocator(const SimplicialTessellation& tess, double tol)
    : tess_(tess), tol_(tol) {
  const std::size_t n = tess.simplex_count();
  const int d = tess.dim();
  // Roughly sqrt(n) evenly spaced seeds for jump-and-walk.
  const std::size_t want = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  const std::size_t step = std::max<std::size_t>(1, n / want);
  for (std::size_t s = 0; s < n; s += step) {
    if (tess.degenerate(s)) continue;
    seeds_.push_back(static_cast<int>(s));
    Vec c{};
    for (int v : tess.simplex(s)) {
      for (int k = 0; k < d; ++k) c[k] += tess.vertices()[v][k] / (d + 1);
    }
    seed_centers_.insert(seed_centers_.end(), c.begin(), c.begin() + d);
  }
}

int PointLocator::seed_for(std::span<const double> q) const {
  const int d = tess_.dim();
  int best = seeds_.empty() ? 0 : seeds_[0];
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < seeds_.size(); ++i) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double diff = seed_centers_[i * d + k] - q[k];
      s += diff * diff;
    }
    if (s < best_dist) {
      best_dist = s;
      best = seeds_[i];
    }
  }
  return best;
}

Location PointLocator::scan(std::span<const double> q) const {
  Location best;
  best.min_bary = -std::numeric_limits<double>::infinity();
  const int d = tess_.dim();
  std::array<double, kMaxDim> b{};
  for (std::size_t s = 0; s < tess_.simplex_count(); ++s) {
    if (tess_.degenerate(s)) continue;
    tess_.barycentric(s, q, b.data());
    double mn = b[0];
    for (int k = 1; k <= d; ++k) mn = std::min(mn, b[k]);
    if (mn > best.min_bary) {
      best.min_bary = mn;
      best.simplex = static_cast<int>(s);
      best.bary = b;
      if (mn >= -tol_) break;
    }
  }
  best.inside = best.simplex >= 0 && best.min_bary >= -tol_;
  return best;
}

Location PointLocator::locate(std::span<const double> q, int hint) const {
  const std::size_t n = tess_.simplex_count();
  if (n == 0) return {};
  if (n <= 64) return scan(q);

  const int d = tess_.dim();
  int s = (hint >= 0 && static_cast<std::size_t>(hint) < n) ? hint : seed_for(q);
  std::array<double, kMaxDim> b{};
  const int max_steps = 4096;
  int prev = -1;
  for (int step = 0; step < max_steps; ++step) {
    if (tess_.degenerate(s)) {
      // Step through flat simplices towards any other neighbor.
      int next = -1;
      for (int k = 0; k <= d; ++k) {
        const int nb = tess_.neighbor(s, k);
        if (nb >= 0 && nb != prev) {
          next = nb;
          break;
        }
      }
      if (next < 0) break;
      prev = s;
      s = next;
      continue;
    }
    tess_.barycentric(s, q, b.data());
    int worst = 0;
    for (int k = 1; k <= d; ++k) {
      if (b[k] < b[worst]) worst = k;
    }
    if (b[worst] >= -tol_) {
      Location loc;
      loc.simplex = s;
      loc.bary = b;
      loc.min_bary = b[worst];
      loc.inside = true;
      return loc;
    }
    const int next = tess_.neighbor(s, worst);
    if (next < 0) {
      // Beyond a boundary face; only a scan can say how far outside.
      break;
    }
    prev = s;
    s = next;
  }
  return scan(q);
}

SparseWeights to_weights(const SimplicialTessellation& tess, const Location& loc) {
  SparseWeights w;
  if (loc.simplex < 0) return w;
  const int d = tess.dim();
  const auto verts = tess.simplex(loc.simplex);
  // Coordinates at roundoff level are dropped along with negative ones.
  constexpr double kDrop = 1e-12;
  double sum = 0.0;
  for (int k = 0; k <= d; ++k) {
    if (loc.bary[k] > kDrop) sum += loc.bary[k];
  }
  for (int k = 0; k <= d; ++k) {
    const double v = loc.bary[k];
    if (v <= kDrop) continue;
    w.index[w.count] = verts[k];
    w.weight[w.count] = v / sum;
    ++w.count;
  }
  return w;
}

SparseWeights locate_and_barycentric(const SimplicialTessellation& tess,
                                     std::span<const double> q) {
  PointLocator locator(tess);
  const Location loc = locator.locate(q);
  if (!loc.inside) throw OutsideHull("point lies outside the tessellation");
  return to_weights(tess, loc);
}

SimplicialTessellation delaunay_tessellate(const PointSet& points) {
  const int d = points.dim();
  if (d < 1 || d >= kMaxDim) throw Error("delaunay: unsupported dimension");
  if (points.size() < static_cast<std::size_t>(d) + 1) {
    throw DegenerateInput("delaunay needs at least dim+1 points", 0);
  }
  const AffineFrame frame = AffineFrame::fit(points);
  if (frame.rank() < d) {
    throw DegenerateInput("delaunay input is not full rank", frame.rank());
  }

  Vec lo{}, hi{};
  for (int k = 0; k < d; ++k) lo[k] = hi[k] = points[0][k];
  for (std::size_t i = 1; i < points.size(); ++i) {
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], points[i][k]);
      hi[k] = std::max(hi[k], points[i][k]);
    }
  }
  double extent = 0.0;
  for (int k = 0; k < d; ++k) extent = std::max(extent, hi[k] - lo[k]);
  const double scale = 1.0 / extent;

  // Lift onto the paraboloid; one extra apex point high above keeps the
  // lifted cloud full rank even when every input point is cospherical.
  const std::size_t n = points.size();
  PointSet lifted(d + 1);
  lifted.reserve(n + 1);
  Vec mean{};
  double max_lift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec p{};
    double lift = 0.0;
    for (int k = 0; k < d; ++k) {
      p[k] = (points[i][k] - 0.5 * (lo[k] + hi[k])) * scale;
      lift += p[k] * p[k];
      mean[k] += p[k] / static_cast<double>(n);
    }
    p[d] = lift;
    max_lift = std::max(max_lift, lift);
    lifted.push_back(std::span<const double>(p.data(), d + 1));
  }
  Vec apex = mean;
  apex[d] = max_lift + 1.0;
  lifted.push_back(std::span<const double>(apex.data(), d + 1));
  const int apex_id = static_cast<int>(n);

  // Inputs close to a low-dimensional surface (smooth images) give lifted
  // clouds so flat that visibility decisions at the default tolerance
  // become inconsistent. Retries widen the coplanarity tolerance; points
  // within it of the lower hull are left unused. Callers handle the final
  // NumericalBreakdown.
  constexpr std::array<double, 3> kEps = {0.0, 1e-10, 1e-9};
  detail::RawHull raw;
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      raw = detail::quickhull(lifted, kEps[attempt]);
      break;
    } catch (const NumericalBreakdown&) {
      if (attempt + 1 == kEps.size()) throw;
    }
  }

  std::vector<int> simplex_of(raw.facets.size(), -1);
  std::vector<SimplexIndices> simplices;
  for (std::size_t f = 0; f < raw.facets.size(); ++f) {
    const auto& facet = raw.facets[f];
    if (facet.normal[d] >= -1e-9) continue;
    bool has_apex = false;
    for (int k = 0; k <= d; ++k) has_apex |= facet.vertices[k] == apex_id;
    if (has_apex) continue;
    simplex_of[f] = static_cast<int>(simplices.size());
    SimplexIndices s{};
    for (int k = 0; k <= d; ++k) s[k] = facet.vertices[k];
    simplices.push_back(s);
  }
  std::vector<SimplexIndices> neighbors(simplices.size());
  for (std::size_t f = 0; f < raw.facets.size(); ++f) {
    const int s = simplex_of[f];
    if (s < 0) continue;
    for (int k = 0; k <= d; ++k) neighbors[s][k] = simplex_of[raw.facets[f].neighbors[k]];
  }
  return SimplicialTessellation(points, std::move(simplices), std::move(neighbors));
}

SimplicialTessellation star_tessellate(const HullMesh& hull, int star) {
  const int d = hull.dim;
  if (star < 0 || static_cast<std::size_t>(star) >= hull.vertex_count()) {
    throw Error("star_tessellate: star is not a hull vertex");
  }
  const auto sp = hull.vertices[star];
  const double eps = detail::default_eps(hull.vertices);
  std::vector<int> simplex_of(hull.facets.size(), -1);
  std::vector<SimplexIndices> simplices;
  for (std::size_t f = 0; f < hull.facets.size(); ++f) {
    const auto& facet = hull.facets[f];
    if (facet.signed_distance(sp, d) >= -eps) continue;
    simplex_of[f] = static_cast<int>(simplices.size());
    SimplexIndices s{};
    for (int k = 0; k < d; ++k) s[k] = facet.vertices[k];
    s[d] = star;
    simplices.push_back(s);
  }
  std::vector<SimplexIndices> neighbors(simplices.size());
  for (std::size_t f = 0; f < hull.facets.size(); ++f) {
    const int s = simplex_of[f];
    if (s < 0) continue;
    for (int k = 0; k < d; ++k) neighbors[s][k] = simplex_of[hull.facets[f].neighbors[k]];
    neighbors[s][d] = -1;
  }
  return SimplicialTessellation(hull.vertices, std::move(simplices), std::move(neighbors));
}

}  // namespace rgbxy::geom
