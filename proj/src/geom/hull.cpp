#include "rgbxy/geom/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rgbxy/error.hpp"
#include "rgbxy/geom/linalg.hpp"

namespace rgbxy::geom {

namespace detail {

double default_eps(const PointSet& cloud) {
  return 1e-11 * std::max(1.0, cloud.max_abs());
}

namespace {

template <int D>
class Quickhull {
 public:
  Quickhull(const PointSet& pts, double eps) : pts_(pts), eps_(eps) {}

  RawHull run() {
    const AffineFrame frame = AffineFrame::fit(pts_);
    if (frame.rank() < D) {
      throw DegenerateInput("convex hull input is not full rank", frame.rank());
    }
    std::array<int, D + 1> simplex{};
    for (int i = 0; i <= D; ++i) simplex[i] = static_cast<int>(frame.spanning_points()[i]);

    interior_.fill(0.0);
    for (int i = 0; i <= D; ++i) {
      const double* p = point(simplex[i]);
      for (int k = 0; k < D; ++k) interior_[k] += p[k] / (D + 1);
    }

    facets_.reserve(64);
    for (int i = 0; i <= D; ++i) {
      Facet f;
      int slot = 0;
      for (int j = 0; j <= D; ++j) {
        if (j == i) continue;
        f.v[slot] = simplex[j];
        f.nb[slot] = j;
        ++slot;
      }
      facets_.push_back(std::move(f));
    }
    for (auto& f : facets_) set_plane(f);

    std::vector<char> in_simplex(pts_.size(), 0);
    for (int s : simplex) in_simplex[s] = 1;
    const int n = static_cast<int>(pts_.size());
    for (int q = 0; q < n; ++q) {
      if (in_simplex[q]) continue;
      const double* p = point(q);
      for (auto& f : facets_) {
        const double d = distance(f, p);
        if (d > eps_) {
          add_outside(f, q, d);
          break;
        }
      }
    }

    // Furthest outside point first: points far from the current hull are the
    // ones most likely to survive as vertices.
    for (int i = 0; i <= D; ++i) push(i);
    while (!queue_.empty()) {
      std::pop_heap(queue_.begin(), queue_.end());
      const QueueEntry e = queue_.back();
      queue_.pop_back();
      const Facet& f = facets_[e.facet];
      if (!f.alive || f.generation != e.generation || f.outside.empty()) continue;
      add_point(e.facet);
    }
    return collect();
  }

 private:
  struct Facet {
    std::array<int, D> v{};
    std::array<int, D> nb{};
    std::array<double, D> n{};
    double off = 0.0;
    std::vector<int> outside;
    int furthest = -1;
    double furthest_dist = 0.0;
    unsigned visit = 0;
    unsigned generation = 0;
    bool visible = false;
    bool alive = true;
  };

  struct QueueEntry {
    double dist = 0.0;
    int facet = 0;
    unsigned generation = 0;
    bool operator<(const QueueEntry& o) const {
      return dist < o.dist || (dist == o.dist && facet > o.facet);
    }
  };

  void push(int id) {
    const Facet& f = facets_[id];
    if (f.outside.empty()) return;
    queue_.push_back({f.furthest_dist, id, f.generation});
    std::push_heap(queue_.begin(), queue_.end());
  }

  // Reuses a dead facet slot when one is free.
  int new_facet(Facet nf) {
    if (free_.empty()) {
      facets_.push_back(std::move(nf));
      return static_cast<int>(facets_.size()) - 1;
    }
    const int id = free_.back();
    free_.pop_back();
    nf.generation = facets_[id].generation + 1;
    facets_[id] = std::move(nf);
    return id;
  }

  static constexpr int kKey = D > 2 ? D - 2 : 1;
  struct RidgeEntry {
    std::array<int, kKey> key{};
    int facet = 0;
    int pos = 0;
  };

  const double* point(int i) const {
    return pts_.coords().data() + static_cast<std::size_t>(i) * D;
  }

  static double distance(const Facet& f, const double* p) {
    double s = -f.off;
    for (int k = 0; k < D; ++k) s += f.n[k] * p[k];
    return s;
  }

  static void add_outside(Facet& f, int q, double d) {
    if (f.outside.empty() || d > f.furthest_dist) {
      f.furthest = q;
      f.furthest_dist = d;
    }
    f.outside.push_back(q);
  }

  // Two orthogonalization passes keep sliver facet normals orthogonal.
  void set_plane(Facet& f) const {
    using Real = double;
    std::array<std::array<Real, D>, D> q{};
    int rank = 0;
    const double* p0 = point(f.v[0]);
    for (int e = 1; e < D; ++e) {
      const double* pe = point(f.v[e]);
      std::array<Real, D> u{};
      for (int k = 0; k < D; ++k) u[k] = static_cast<Real>(pe[k]) - static_cast<Real>(p0[k]);
      for (int pass = 0; pass < 2; ++pass) {
        for (int b = 0; b < rank; ++b) {
          Real proj = 0.0;
          for (int k = 0; k < D; ++k) proj += u[k] * q[b][k];
          for (int k = 0; k < D; ++k) u[k] -= proj * q[b][k];
        }
      }
      Real len = 0.0;
      for (int k = 0; k < D; ++k) len += u[k] * u[k];
      len = std::sqrt(len);
      if (len == 0.0) continue;
      for (int k = 0; k < D; ++k) q[rank][k] = u[k] / len;
      ++rank;
    }
    // Start from the coordinate axis least covered by the facet span.
    int axis = 0;
    Real least = 2.0;
    for (int a = 0; a < D; ++a) {
      Real cover = 0.0;
      for (int b = 0; b < rank; ++b) cover += q[b][a] * q[b][a];
      if (cover < least) {
        least = cover;
        axis = a;
      }
    }
    std::array<Real, D> nrm{};
    nrm[axis] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int b = 0; b < rank; ++b) {
        Real proj = 0.0;
        for (int k = 0; k < D; ++k) proj += nrm[k] * q[b][k];
        for (int k = 0; k < D; ++k) nrm[k] -= proj * q[b][k];
      }
    }
    Real len = 0.0;
    for (int k = 0; k < D; ++k) len += nrm[k] * nrm[k];
    len = std::sqrt(len);
    for (int k = 0; k < D; ++k) nrm[k] /= len;

    Real off = 0.0;
    for (int i = 0; i < D; ++i) {
      const double* p = point(f.v[i]);
      for (int k = 0; k < D; ++k) off += nrm[k] * p[k];
    }
    off /= D;
    Real side = -off;
    for (int k = 0; k < D; ++k) side += nrm[k] * interior_[k];
    const Real sign = side > 0.0 ? -1.0 : 1.0;
    for (int k = 0; k < D; ++k) f.n[k] = static_cast<double>(sign * nrm[k]);
    f.off = static_cast<double>(sign * off);
  }

  void add_point(int start) {
    const int apex = facets_[start].furthest;
    const double* pa = point(apex);
    ++stamp_;

    // Facets with the apex on or above their plane are replaced.
    visible_.clear();
    visible_.push_back(start);
    facets_[start].visit = stamp_;
    facets_[start].visible = true;
    for (std::size_t k = 0; k < visible_.size(); ++k) {
      const int f = visible_[k];
      for (int i = 0; i < D; ++i) {
        const int g = facets_[f].nb[i];
        Facet& fg = facets_[g];
        if (fg.visit == stamp_) continue;
        fg.visit = stamp_;
        fg.visible = distance(fg, pa) > -eps_;
        if (fg.visible) visible_.push_back(g);
      }
    }

    created_.clear();
    ridges_.clear();
    for (const int f : visible_) {
      for (int i = 0; i < D; ++i) {
        const int g = facets_[f].nb[i];
        if (facets_[g].visible) continue;
        Facet nf;
        nf.v = facets_[f].v;
        nf.v[i] = apex;
        nf.nb[i] = g;
        const int id = new_facet(std::move(nf));
        for (int k = 0; k < D; ++k) {
          if (facets_[g].nb[k] == f) {
            facets_[g].nb[k] = id;
            break;
          }
        }
        created_.push_back(id);
        for (int j = 0; j < D; ++j) {
          if (j == i) continue;
          RidgeEntry r;
          r.facet = id;
          r.pos = j;
          int slot = 0;
          for (int k = 0; k < D; ++k) {
            if (k == j || k == i) continue;
            r.key[slot++] = facets_[id].v[k];
          }
          std::sort(r.key.begin(), r.key.begin() + slot);
          ridges_.push_back(r);
        }
      }
    }

    match_ridges();

    for (const int id : created_) set_plane(facets_[id]);

    for (const int f : visible_) {
      Facet& fv = facets_[f];
      fv.alive = false;
      for (const int q : fv.outside) {
        if (q == apex) continue;
        const double* p = point(q);
        for (const int id : created_) {
          const double d = distance(facets_[id], p);
          if (d > eps_) {
            add_outside(facets_[id], q, d);
            break;
          }
        }
      }
      std::vector<int>().swap(fv.outside);
    }
    for (const int f : visible_) free_.push_back(f);
    for (const int id : created_) push(id);
  }

  static std::size_t ridge_hash(const std::array<int, kKey>& key) {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (int k : key) h = (h ^ static_cast<std::size_t>(k)) * 0x100000001b3ull;
    return h ^ (h >> 29);
  }

  // Pairs up the new facets across their shared ridges. Every ridge on the
  // new cone must appear exactly twice.
  void match_ridges() {
    std::size_t cap = 16;
    while (cap < 2 * ridges_.size()) cap *= 2;
    table_.assign(cap, -1);
    matched_.assign(ridges_.size(), 0);
    for (std::size_t r = 0; r < ridges_.size(); ++r) {
      std::size_t slot = ridge_hash(ridges_[r].key) & (cap - 1);
      while (true) {
        const int other = table_[slot];
        if (other < 0) {
          table_[slot] = static_cast<int>(r);
          break;
        }
        if (ridges_[other].key == ridges_[r].key) {
          if (matched_[other]) throw NumericalBreakdown("quickhull: horizon is not a manifold");
          matched_[other] = 1;
          matched_[r] = 1;
          const RidgeEntry& a = ridges_[other];
          const RidgeEntry& b = ridges_[r];
          facets_[a.facet].nb[a.pos] = b.facet;
          facets_[b.facet].nb[b.pos] = a.facet;
          break;
        }
        slot = (slot + 1) & (cap - 1);
      }
    }
    for (char m : matched_) {
      if (!m) throw NumericalBreakdown("quickhull: horizon is not a manifold");
    }
  }

  RawHull collect() const {
    RawHull out;
    out.dim = D;
    std::vector<int> remap(facets_.size(), -1);
    int count = 0;
    for (std::size_t i = 0; i < facets_.size(); ++i) {
      if (facets_[i].alive) remap[i] = count++;
    }
    out.facets.reserve(count);
    for (const auto& f : facets_) {
      if (!f.alive) continue;
      HullFacet h;
      for (int k = 0; k < D; ++k) {
        h.vertices[k] = f.v[k];
        h.neighbors[k] = remap[f.nb[k]];
        h.normal[k] = f.n[k];
      }
      h.offset = f.off;
      out.facets.push_back(h);
    }
    return out;
  }

  const PointSet& pts_;
  const double eps_;
  std::array<double, D> interior_{};
  std::vector<Facet> facets_;
  std::vector<int> visible_;
  std::vector<int> created_;
  std::vector<RidgeEntry> ridges_;
  std::vector<int> table_;
  std::vector<char> matched_;
  std::vector<QueueEntry> queue_;
  std::vector<int> free_;
  unsigned stamp_ = 0;
};

RawHull hull_1d(const PointSet& pts) {
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i][0] < pts[lo][0]) lo = i;
    if (pts[i][0] > pts[hi][0]) hi = i;
  }
  if (pts.size() < 2 || pts[hi][0] - pts[lo][0] <= 1e-9 * std::max(1.0, pts.max_abs())) {
    throw DegenerateInput("convex hull input is not full rank", 0);
  }
  RawHull out;
  out.dim = 1;
  HullFacet a, b;
  a.vertices[0] = static_cast<int>(lo);
  a.neighbors[0] = 1;
  a.normal[0] = -1.0;
  a.offset = -pts[lo][0];
  b.vertices[0] = static_cast<int>(hi);
  b.neighbors[0] = 0;
  b.normal[0] = 1.0;
  b.offset = pts[hi][0];
  out.facets = {a, b};
  return out;
}

}  // namespace

RawHull quickhull(const PointSet& cloud, double eps) {
  if (eps <= 0.0) eps = default_eps(cloud);
  switch (cloud.dim()) {
    case 1:
      return hull_1d(cloud);
    case 2:
      return Quickhull<2>(cloud, eps).run();
    case 3:
      return Quickhull<3>(cloud, eps).run();
    case 4:
      return Quickhull<4>(cloud, eps).run();
    case 5:
      return Quickhull<5>(cloud, eps).run();
    case 6:
      return Quickhull<6>(cloud, eps).run();
    default:
      throw Error("convex hull: unsupported dimension");
  }
}

}  // namespace detail

HullMesh convex_hull(const PointSet& cloud, double eps) {
  if (cloud.size() < static_cast<std::size_t>(cloud.dim()) + 1) {
    throw DegenerateInput("convex hull needs at least dim+1 points", 0);
  }
  detail::RawHull raw = detail::quickhull(cloud, eps);
  const int d = raw.dim;

  std::vector<int> used;
  used.reserve(raw.facets.size() * d);
  for (const auto& f : raw.facets) {
    for (int k = 0; k < d; ++k) used.push_back(f.vertices[k]);
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());

  HullMesh mesh;
  mesh.dim = d;
  mesh.vertices = PointSet(d);
  mesh.vertices.reserve(used.size());
  std::vector<int> local(cloud.size(), -1);
  for (std::size_t i = 0; i < used.size(); ++i) {
    local[used[i]] = static_cast<int>(i);
    mesh.vertices.push_back(cloud[used[i]]);
    mesh.source.push_back(static_cast<std::size_t>(used[i]));
  }
  mesh.facets = std::move(raw.facets);
  for (auto& f : mesh.facets) {
    for (int k = 0; k < d; ++k) f.vertices[k] = local[f.vertices[k]];
  }
  return mesh;
}

double HullMesh::signed_distance(std::span<const double> x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& f : facets) best = std::max(best, f.signed_distance(x, dim));
  return best;
}

Vec HullMesh::centroid() const {
  Vec c{};
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) c[k] += vertices[i][k];
  }
  for (int k = 0; k < dim; ++k) c[k] /= static_cast<double>(n);
  return c;
}

double HullMesh::volume() const {
  if (facets.empty()) return 0.0;
  const Vec c = centroid();
  double vol = 0.0;
  for (const auto& f : facets) {
    vol += simplex_volume(dim, [&](int i) -> std::span<const double> {
      if (i == dim) return {c.data(), static_cast<std::size_t>(dim)};
      return vertices[f.vertices[i]];
    });
  }
  return vol;
}

ReducedHull reduced_convex_hull(const PointSet& cloud) {
  ReducedHull out;
  out.frame = AffineFrame::fit(cloud);
  if (out.frame.rank() == 0) {
    out.hull.dim = 0;
    if (!cloud.empty()) out.hull.source.push_back(0);
    return out;
  }
  out.hull = convex_hull(out.frame.to_local(cloud));
  return out;
}

}  // namespace rgbxy::geom
