#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rgbxy/geom/hull.hpp"
#include "rgbxy/geom/point_set.hpp"

namespace rgbxy::geom {

/// Convex weights over at most kMaxDim vertices.
struct SparseWeights {
  int count = 0;
  std::array<int, kMaxDim> index{};
  std::array<double, kMaxDim> weight{};
};

using SimplexIndices = std::array<int, kMaxDim>;

/// Simplices over a shared vertex array, with face adjacency and the
/// per-simplex affine maps needed for barycentric coordinates.
/// `neighbors[s][i]` is the simplex across the face opposite vertex i, or -1
/// on the boundary. Dimension at most kMaxDim - 1.
class SimplicialTessellation {
 public:
  SimplicialTessellation() = default;
  SimplicialTessellation(PointSet vertices, std::vector<SimplexIndices> simplices,
                         std::vector<SimplexIndices> neighbors);

  int dim() const { return dim_; }
  const PointSet& vertices() const { return vertices_; }
  std::size_t simplex_count() const { return simplices_.size(); }
  std::span<const int> simplex(std::size_t s) const {
    return {simplices_[s].data(), static_cast<std::size_t>(dim_ + 1)};
  }
  int neighbor(std::size_t s, int i) const { return neighbors_[s][i]; }
  bool degenerate(std::size_t s) const { return det_[s] == 0.0; }

  double volume(std::size_t s) const;
  double total_volume() const;

  /// Writes dim+1 barycentric coordinates of q w.r.t. simplex s.
  void barycentric(std::size_t s, std::span<const double> q, double* out) const;

 private:
  int dim_ = 0;
  PointSet vertices_;
  std::vector<SimplexIndices> simplices_;
  std::vector<SimplexIndices> neighbors_;
  std::vector<double> inverse_;  // dim*dim per simplex
  std::vector<double> det_;
};

struct Location {
  int simplex = -1;
  std::array<double, kMaxDim> bary{};
  double min_bary = 0.0;
  bool inside = false;
};

/// Point location by visibility walk from a hint simplex, falling back to an
/// exhaustive scan. Immutable after construction; safe to share across
/// threads.
class PointLocator {
 public:
  explicit PointLocator(const SimplicialTessellation& tess, double tol = 1e-9);

  /// Returns the containing simplex (inside == true) or, when q is outside
  /// every simplex by more than tol, the simplex with the largest minimum
  /// barycentric coordinate.
  Location locate(std::span<const double> q, int hint = -1) const;

  const SimplicialTessellation& tessellation() const { return tess_; }

 private:
  Location scan(std::span<const double> q) const;
  int seed_for(std::span<const double> q) const;

  const SimplicialTessellation& tess_;
  double tol_;
  std::vector<int> seeds_;
  std::vector<double> seed_centers_;
};

/// Clamps tiny negatives, renormalizes and drops zero entries. Indices are
/// tessellation vertex ids.
SparseWeights to_weights(const SimplicialTessellation& tess, const Location& loc);

/// Throws OutsideHull when no simplex contains q within 1e-9.
SparseWeights locate_and_barycentric(const SimplicialTessellation& tess,
                                     std::span<const double> q);

/// Delaunay tessellation via the lifted lower hull. Vertices are the input
/// points (some may be unused if they coincide with others within
/// tolerance). Throws DegenerateInput for rank-deficient input.
SimplicialTessellation delaunay_tessellate(const PointSet& points);

/// Cones every facet not containing `star` to it. Facets whose plane passes
/// through the star vertex would give flat simplices and are skipped.
SimplicialTessellation star_tessellate(const HullMesh& hull, int star);

}  // namespace rgbxy::geom
