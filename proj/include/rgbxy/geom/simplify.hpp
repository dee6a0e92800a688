#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rgbxy/geom/hull.hpp"

namespace rgbxy::geom {

struct EdgeCollapse {
  int a = -1;
  int b = -1;
  Vec point{};
  double added_volume = 0.0;
};

/// Best volume-adding collapse of every hull edge; the optimum for each edge
/// minimizes the volume added between the new point and the faces incident
/// to either endpoint, subject to lying on or outside each of those planes.
/// Returns nothing when no edge admits a feasible point.
std::optional<EdgeCollapse> cheapest_collapse(const HullMesh& hull);

/// Greedy simplification of a 3D hull. The returned sequence starts with the
/// input hull; each later entry is the hull after one more collapse. A
/// candidate for which `stop` returns true is discarded and the sequence
/// ends. Also ends at a tetrahedron or when no collapse is feasible.
std::vector<HullMesh> simplify_hull(const HullMesh& hull,
                                    const std::function<bool(const HullMesh&)>& stop);

}  // namespace rgbxy::geom
