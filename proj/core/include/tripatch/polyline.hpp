#pragma once

#include <vector>

#include "tripatch/canny.hpp"

namespace tripatch {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2& o) const { return x == o.x && y == o.y; }
};

/// Ordered chain of 2D points in pixel coordinates. Closed chains do not
/// repeat the first point at the end.
struct Polyline {
    std::vector<Point2> points;
    bool closed = false;
};

/// Chains edge pixels into polylines through 8-connectivity. A diagonal link
/// is suppressed when either of its two orthogonal in-between pixels is an
/// edge pixel, so corners do not read as junctions. Chains split at junction
/// pixels (>= 3 links), with the junction pixel replicated as an endpoint of
/// each chain; pure cycles are flagged closed; chains of fewer than 2 points
/// are dropped. Points carry raw pixel indices as floats.
std::vector<Polyline> trace_polylines(const EdgeMap& edges);

/// Douglas-Peucker simplification: every input point stays within eps of the
/// output chain; endpoints are preserved; closed chains keep >= 3 points.
/// eps == 0 only removes exact consecutive duplicates.
Polyline simplify_polyline(const Polyline& p, double eps);

/// Distance from a point to a segment, shared with the simplifier's tests.
double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);

} // namespace tripatch
