#pragma once

#include <array>
#include <vector>

#include "tripatch/mesh2d.hpp"
#include "tripatch/polyline.hpp"

namespace tripatch {

/// Planar straight-line constraint set over the image rectangle: vertices in
/// [0,W]x[0,H], non-crossing segments with no vertex strictly inside any
/// segment. The first four vertices are the rectangle corners.
struct Constraints {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 2>> segments;
};

/// Turns simplified polylines into a CDT-ready constraint set. Points are
/// deduplicated by snapping to an earlier vertex within snap_eps; the four
/// image corners and border edges are added so the triangulation covers the
/// frame; properly crossing segments are split at their intersection points,
/// collinear overlaps at each other's endpoints, and any segment passing
/// exactly through a vertex is split there (which subdivides border edges at
/// touching polyline endpoints).
Constraints build_constraints(const std::vector<Polyline>& polylines, int width, int height,
                              double snap_eps);

/// Constrained Delaunay triangulation of the constraint set: all vertices
/// appear, every constraint segment is an edge, and every non-constrained
/// edge is locally Delaunay. Faces with area <= 1e-6 px^2 trigger a retry
/// with the offending vertex perturbed by 1e-3 px (direction seeded by the
/// vertex index).
Mesh2D triangulate_cdt(const Constraints& constraints, int width, int height);

} // namespace tripatch
