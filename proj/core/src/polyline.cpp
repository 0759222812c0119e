#include "tripatch/polyline.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "tripatch/errors.hpp"

namespace tripatch {

namespace {

// Fixed direction order keeps traced output deterministic.
constexpr std::array<std::pair<int, int>, 8> kDirs = {
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

int reverse_dir(int d) { return (d + 4) % 8; }

struct LinkGraph {
    int w = 0, h = 0;
    std::vector<uint8_t> links; // bitmask over kDirs
    std::vector<uint8_t> used;

    bool has_link(std::size_t i, int d) const { return (links[i] >> d) & 1; }
    int degree(std::size_t i) const {
        int n = 0;
        for (int d = 0; d < 8; ++d) n += (links[i] >> d) & 1;
        return n;
    }
};

LinkGraph build_links(const EdgeMap& edges) {
    LinkGraph g;
    g.w = edges.width;
    g.h = edges.height;
    g.links.assign(static_cast<std::size_t>(g.w) * g.h, 0);
    g.used.assign(g.links.size(), 0);
    auto is_edge = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < g.w && y < g.h && edges.at(x, y);
    };
    for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x) {
            if (!edges.at(x, y)) continue;
            uint8_t mask = 0;
            for (int d = 0; d < 8; ++d) {
                const auto [dx, dy] = kDirs[d];
                if (!is_edge(x + dx, y + dy)) continue;
                // Diagonal links are redundant when an orthogonal step exists.
                if (dx != 0 && dy != 0 && (is_edge(x + dx, y) || is_edge(x, y + dy))) continue;
                mask |= static_cast<uint8_t>(1 << d);
            }
            g.links[static_cast<std::size_t>(y) * g.w + x] = mask;
        }
    return g;
}

Point2 pixel_point(const LinkGraph& g, std::size_t i) {
    return {static_cast<double>(i % g.w), static_cast<double>(i / g.w)};
}

// Walks from `start` through direction `d0` until hitting a pixel whose
// degree differs from 2 or closing a cycle. Marks traversed links used.
std::vector<std::size_t> walk_chain(LinkGraph& g, std::size_t start, int d0) {
    std::vector<std::size_t> chain{start};
    std::size_t cur = start;
    int dir = d0;
    for (;;) {
        const auto [dx, dy] = kDirs[dir];
        const std::size_t next = cur + static_cast<std::size_t>(dy) * g.w + dx;
        g.used[cur] |= static_cast<uint8_t>(1 << dir);
        g.used[next] |= static_cast<uint8_t>(1 << reverse_dir(dir));
        chain.push_back(next);
        if (g.degree(next) != 2 || next == start) break;
        int out = -1;
        for (int d = 0; d < 8; ++d)
            if (g.has_link(next, d) && d != reverse_dir(dir)) {
                out = d;
                break;
            }
        if (out < 0) break; // other link already consumed (shared cycle entry)
        if ((g.used[next] >> out) & 1) break;
        cur = next;
        dir = out;
    }
    return chain;
}

} // namespace

std::vector<Polyline> trace_polylines(const EdgeMap& edges) {
    LinkGraph g = build_links(edges);
    std::vector<Polyline> out;

    // Pass 1: open chains, started from endpoints and junctions.
    for (std::size_t i = 0; i < g.links.size(); ++i) {
        if (!g.links[i] || g.degree(i) == 2) continue;
        for (int d = 0; d < 8; ++d) {
            if (!g.has_link(i, d) || ((g.used[i] >> d) & 1)) continue;
            const std::vector<std::size_t> chain = walk_chain(g, i, d);
            if (chain.size() < 2) continue;
            Polyline p;
            p.points.reserve(chain.size());
            for (std::size_t c : chain) p.points.push_back(pixel_point(g, c));
            out.push_back(std::move(p));
        }
    }
    // Pass 2: leftover links form pure degree-2 cycles.
    for (std::size_t i = 0; i < g.links.size(); ++i) {
        if (!g.links[i]) continue;
        for (int d = 0; d < 8; ++d) {
            if (!g.has_link(i, d) || ((g.used[i] >> d) & 1)) continue;
            std::vector<std::size_t> chain = walk_chain(g, i, d);
            if (chain.size() < 2) continue;
            Polyline p;
            p.closed = chain.size() > 2 && chain.front() == chain.back();
            if (p.closed) chain.pop_back(); // closed chains do not repeat the start
            p.points.reserve(chain.size());
            for (std::size_t c : chain) p.points.push_back(pixel_point(g, c));
            out.push_back(std::move(p));
        }
    }
    return out;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const double abx = b.x - a.x, aby = b.y - a.y;
    const double len2 = abx * abx + aby * aby;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * abx + (p.y - a.y) * aby) / len2, 0.0, 1.0);
    const double dx = p.x - (a.x + t * abx), dy = p.y - (a.y + t * aby);
    return std::hypot(dx, dy);
}

namespace {

void douglas_peucker(const std::vector<Point2>& pts, std::size_t first, std::size_t last,
                     double eps, std::vector<uint8_t>& keep) {
    if (last <= first + 1) return;
    double worst = -1.0;
    std::size_t worst_idx = first;
    for (std::size_t i = first + 1; i < last; ++i) {
        const double d = point_segment_distance(pts[i], pts[first], pts[last]);
        if (d > worst) {
            worst = d;
            worst_idx = i;
        }
    }
    if (worst > eps) {
        keep[worst_idx] = 1;
        douglas_peucker(pts, first, worst_idx, eps, keep);
        douglas_peucker(pts, worst_idx, last, eps, keep);
    }
}

Polyline dedup_consecutive(const Polyline& p) {
    Polyline out;
    out.closed = p.closed;
    for (const Point2& q : p.points)
        if (out.points.empty() || !(out.points.back() == q)) out.points.push_back(q);
    if (out.closed && out.points.size() > 1 && out.points.front() == out.points.back())
        out.points.pop_back();
    return out;
}

} // namespace

Polyline simplify_polyline(const Polyline& p, double eps) {
    if (eps < 0.0) throw input_error("simplify_polyline: eps must be >= 0");
    Polyline input = dedup_consecutive(p);
    const std::size_t n = input.points.size();
    if (eps == 0.0 || n <= 2) return input;

    std::vector<uint8_t> keep(n, 0);
    if (!input.closed) {
        keep.front() = keep.back() = 1;
        douglas_peucker(input.points, 0, n - 1, eps, keep);
    } else {
        // Anchor at point 0 and the farthest point from it, then simplify the
        // two arcs. The wrap-around arc is handled on a rotated copy.
        std::size_t far_idx = 1;
        double far_d = -1.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double d = std::hypot(input.points[i].x - input.points[0].x,
                                        input.points[i].y - input.points[0].y);
            if (d > far_d) {
                far_d = d;
                far_idx = i;
            }
        }
        keep[0] = keep[far_idx] = 1;
        douglas_peucker(input.points, 0, far_idx, eps, keep);
        std::vector<Point2> wrap(input.points.begin() + static_cast<std::ptrdiff_t>(far_idx),
                                 input.points.end());
        wrap.push_back(input.points[0]);
        std::vector<uint8_t> wkeep(wrap.size(), 0);
        wkeep.front() = wkeep.back() = 1;
        douglas_peucker(wrap, 0, wrap.size() - 1, eps, wkeep);
        for (std::size_t i = 1; i + 1 < wrap.size(); ++i)
            if (wkeep[i]) keep[far_idx + i] = 1;
    }

    Polyline out;
    out.closed = input.closed;
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) out.points.push_back(input.points[i]);

    if (out.closed && out.points.size() < 3) {
        // Reinstate the point farthest from the kept pair so the loop stays a polygon.
        std::size_t best = 0;
        double best_d = -1.0;
        std::size_t far_idx = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (keep[i] && i > 0) far_idx = i;
        for (std::size_t i = 0; i < n; ++i) {
            if (keep[i]) continue;
            const double d = point_segment_distance(input.points[i], out.points.front(),
                                                    out.points.back());
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best_d >= 0.0) {
            if (best < far_idx)
                out.points.insert(out.points.begin() + 1, input.points[best]);
            else
                out.points.push_back(input.points[best]);
        }
    }
    return out;
}

} // namespace tripatch
