#include "tripatch/geom_predicates.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace tripatch {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Filter constants slightly above Shewchuk's bounds (3+16eps)eps and
// (10+96eps)eps; anything looser is still safe, only slower.
constexpr double kOrientErrBound = 4.0e-16;
constexpr double kIncircleErrBound = 2.0e-15;

int sign_of(const Rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

int orient2d_exact(double ax, double ay, double bx, double by, double cx, double cy) {
    const Rational rax(ax), ray(ay), rbx(bx), rby(by), rcx(cx), rcy(cy);
    const Rational det = (rbx - rax) * (rcy - ray) - (rby - ray) * (rcx - rax);
    return sign_of(det);
}

int incircle_exact(double ax, double ay, double bx, double by, double cx, double cy,
                   double dx, double dy) {
    const Rational adx = Rational(ax) - Rational(dx);
    const Rational ady = Rational(ay) - Rational(dy);
    const Rational bdx = Rational(bx) - Rational(dx);
    const Rational bdy = Rational(by) - Rational(dy);
    const Rational cdx = Rational(cx) - Rational(dx);
    const Rational cdy = Rational(cy) - Rational(dy);
    const Rational alift = adx * adx + ady * ady;
    const Rational blift = bdx * bdx + bdy * bdy;
    const Rational clift = cdx * cdx + cdy * cdy;
    const Rational det = alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
                         clift * (adx * bdy - ady * bdx);
    return sign_of(det);
}

} // namespace

int orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
    const double detleft = (bx - ax) * (cy - ay);
    const double detright = (by - ay) * (cx - ax);
    const double det = detleft - detright;
    const double detsum = std::abs(detleft) + std::abs(detright);
    if (std::abs(det) > kOrientErrBound * detsum) return det > 0.0 ? 1 : -1;
    if (detsum == 0.0) return 0; // both products exactly zero
    return orient2d_exact(ax, ay, bx, by, cx, cy);
}

int incircle(double ax, double ay, double bx, double by, double cx, double cy,
             double dx, double dy) {
    const double adx = ax - dx, ady = ay - dy;
    const double bdx = bx - dx, bdy = by - dy;
    const double cdx = cx - dx, cdy = cy - dy;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double det = alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
                       clift * (adx * bdy - ady * bdx);
    const double permanent = alift * (std::abs(bdx * cdy) + std::abs(bdy * cdx)) +
                             blift * (std::abs(cdx * ady) + std::abs(cdy * adx)) +
                             clift * (std::abs(adx * bdy) + std::abs(ady * bdx));
    if (std::abs(det) > kIncircleErrBound * permanent) return det > 0.0 ? 1 : -1;
    return incircle_exact(ax, ay, bx, by, cx, cy, dx, dy);
}

bool segments_properly_cross(double ax, double ay, double bx, double by,
                             double cx, double cy, double dx, double dy) {
    const int o1 = orient2d(ax, ay, bx, by, cx, cy);
    const int o2 = orient2d(ax, ay, bx, by, dx, dy);
    const int o3 = orient2d(cx, cy, dx, dy, ax, ay);
    const int o4 = orient2d(cx, cy, dx, dy, bx, by);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

bool strictly_inside_segment(double px, double py, double ax, double ay, double bx, double by) {
    if ((px == ax && py == ay) || (px == bx && py == by)) return false;
    if (orient2d(ax, ay, bx, by, px, py) != 0) return false;
    if (std::min(ax, bx) > px || px > std::max(ax, bx)) return false;
    if (std::min(ay, by) > py || py > std::max(ay, by)) return false;
    // Degenerate segment (a == b) never has an interior.
    return !(ax == bx && ay == by);
}

} // namespace tripatch
