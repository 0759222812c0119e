#pragma once

namespace tripatch {

/// Sign of the orientation determinant (bx-ax)(cy-ay) - (by-ay)(cx-ax).
/// +1 when a,b,c wind counter-clockwise (positive x/y axes), -1 clockwise,
/// 0 exactly collinear. Double fast path with a forward error filter; the
/// undecidable band falls back to exact rational arithmetic.
int orient2d(double ax, double ay, double bx, double by, double cx, double cy);

/// Sign of the in-circumcircle determinant for CCW triangle (a,b,c): +1 when
/// d lies strictly inside the circumcircle, 0 on it, -1 outside. Exact.
int incircle(double ax, double ay, double bx, double by, double cx, double cy,
             double dx, double dy);

/// True when segments (a,b) and (c,d) cross at a single interior point of
/// both (proper intersection). Shared endpoints and touches do not count.
bool segments_properly_cross(double ax, double ay, double bx, double by,
                             double cx, double cy, double dx, double dy);

/// True when p lies exactly on the open segment (a,b), endpoints excluded.
bool strictly_inside_segment(double px, double py, double ax, double ay, double bx, double by);

} // namespace tripatch
