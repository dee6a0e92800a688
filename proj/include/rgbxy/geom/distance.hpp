#pragma once

#include <span>

#include "rgbxy/geom/hull.hpp"

namespace rgbxy::geom {

struct HullDistance {
  double distance = 0.0;
  Vec closest{};
};

/// Euclidean distance from q to a 2D or 3D hull; zero with closest == q for
/// points inside.
HullDistance distance_to_hull(const HullMesh& hull, std::span<const double> q);

/// Closest point on triangle abc to p (Ericson, Real-Time Collision
/// Detection 5.1.5).
Vec closest_point_on_triangle(const Vec& p, const Vec& a, const Vec& b, const Vec& c);

Vec closest_point_on_segment(const Vec& p, const Vec& a, const Vec& b, int dim);

}  // namespace rgbxy::geom
