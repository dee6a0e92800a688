#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rgbxy/geom/point_set.hpp"

namespace rgbxy::geom {

/// Simplicial hull facet. `vertices[i]` and `neighbors[i]` are paired: the
/// neighbor shares every vertex except `vertices[i]`. Outward normal is unit
/// length; a point x lies outside when dot(normal, x) > offset.
struct HullFacet {
  std::array<int, kMaxDim> vertices{};
  std::array<int, kMaxDim> neighbors{};
  Vec normal{};
  double offset = 0.0;

  double signed_distance(std::span<const double> x, int dim) const {
    double s = -offset;
    for (int k = 0; k < dim; ++k) s += normal[k] * x[k];
    return s;
  }
};

/// Full-rank convex hull. Vertex ids in facets index `vertices`; `source`
/// maps each vertex back to the input cloud. Vertices are ordered by source
/// index.
struct HullMesh {
  int dim = 0;
  PointSet vertices;
  std::vector<std::size_t> source;
  std::vector<HullFacet> facets;

  std::size_t vertex_count() const { return vertices.size(); }

  /// max over facets of the signed facet distance; <= 0 means inside.
  double signed_distance(std::span<const double> x) const;
  double volume() const;
  /// Mean of the vertices; strictly interior for a full-rank hull.
  Vec centroid() const;
};

/// Quickhull in 2..6 dimensions (1D handled directly). Points closer than
/// `eps` to a facet plane are treated as on it. eps <= 0 picks a tolerance
/// scaled to the coordinates.
/// Throws DegenerateInput when the cloud is not full rank.
HullMesh convex_hull(const PointSet& cloud, double eps = 0.0);

/// Convex hull of a cloud of any rank: fits the affine frame, hulls the
/// projected points in that frame.
struct ReducedHull {
  AffineFrame frame;
  HullMesh hull;  // in frame-local coordinates; empty when rank == 0
  std::vector<std::size_t> vertex_source() const { return hull.source; }
};

ReducedHull reduced_convex_hull(const PointSet& cloud);

namespace detail {

/// Raw quickhull output over input point indices; used by the Delaunay
/// construction which needs the facet adjacency of the lifted hull.
struct RawHull {
  int dim = 0;
  std::vector<HullFacet> facets;  // vertices are input indices
};

RawHull quickhull(const PointSet& cloud, double eps);

double default_eps(const PointSet& cloud);

}  // namespace detail

}  // namespace rgbxy::geom
