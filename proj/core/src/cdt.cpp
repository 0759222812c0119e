#include "tripatch/cdt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "tripatch/errors.hpp"
#include "tripatch/geom_predicates.hpp"

namespace tripatch {

namespace {

constexpr double kFaceAreaEps = 1e-6;  // px^2
constexpr double kSplitSnapEps = 1e-3; // px, split points merge onto vertices
constexpr int kMaxResolvePasses = 16;
constexpr int kMaxPerturbRetries = 3;
constexpr double kTau = 6.283185307179586;

double sq_dist(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

int orient_pts(const Point2& a, const Point2& b, const Point2& c) {
    return orient2d(a.x, a.y, b.x, b.y, c.x, c.y);
}

// --------------------------------------------------------------------------
// Constraint preprocessing: crossing resolution and vertex-on-segment splits.

struct SegKey {
    int a, b;
    SegKey(int i, int j) : a(std::min(i, j)), b(std::max(i, j)) {}
    bool operator<(const SegKey& o) const { return a != o.a ? a < o.a : b < o.b; }
};

/// Index of an existing vertex within eps of p (nearest wins, lowest index
/// on ties), or -1. Linear scan; constraint sets stay small.
int find_near_vertex(const std::vector<Point2>& verts, const Point2& p, double eps) {
    int best = -1;
    double best_d = eps * eps;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const double d = sq_dist(verts[i], p);
        if (d < best_d || (d == best_d && best < 0)) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

bool collinear_overlap(const std::vector<Point2>& v, int a, int b, int c, int d) {
    if (orient_pts(v[a], v[b], v[c]) != 0 || orient_pts(v[a], v[b], v[d]) != 0) return false;
    auto inside = [&](int p, int s0, int s1) {
        return strictly_inside_segment(v[p].x, v[p].y, v[s0].x, v[s0].y, v[s1].x, v[s1].y);
    };
    return inside(c, a, b) || inside(d, a, b) || inside(a, c, d) || inside(b, c, d);
}

Point2 intersection_point(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double rx = b.x - a.x, ry = b.y - a.y;
    const double sx = d.x - c.x, sy = d.y - c.y;
    const double denom = rx * sy - ry * sx;
    const double t = ((c.x - a.x) * sy - (c.y - a.y) * sx) / denom;
    return {a.x + t * rx, a.y + t * ry};
}

/// Splits segments until none properly cross, none collinearly overlap, and
/// no vertex lies strictly inside a segment. May append vertices.
void resolve_constraints(Constraints& c) {
    for (int pass = 0; pass < kMaxResolvePasses; ++pass) {
        bool changed = false;
        std::vector<std::vector<int>> splits(c.segments.size());

        struct Bbox {
            double x0, y0, x1, y1;
        };
        std::vector<Bbox> boxes(c.segments.size());
        for (std::size_t i = 0; i < c.segments.size(); ++i) {
            const Point2 &a = c.vertices[c.segments[i][0]], &b = c.vertices[c.segments[i][1]];
            boxes[i] = {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x),
                        std::max(a.y, b.y)};
        }

        for (std::size_t i = 0; i < c.segments.size(); ++i) {
            for (std::size_t j = i + 1; j < c.segments.size(); ++j) {
                if (boxes[i].x1 < boxes[j].x0 || boxes[j].x1 < boxes[i].x0 ||
                    boxes[i].y1 < boxes[j].y0 || boxes[j].y1 < boxes[i].y0)
                    continue;
                const int a = c.segments[i][0], b = c.segments[i][1];
                const int d = c.segments[j][0], e = c.segments[j][1];
                const Point2 &pa = c.vertices[a], &pb = c.vertices[b];
                const Point2 &pd = c.vertices[d], &pe = c.vertices[e];
                if (segments_properly_cross(pa.x, pa.y, pb.x, pb.y, pd.x, pd.y, pe.x, pe.y)) {
                    const Point2 x = intersection_point(pa, pb, pd, pe);
                    int xi = find_near_vertex(c.vertices, x, kSplitSnapEps);
                    if (xi < 0) {
                        xi = static_cast<int>(c.vertices.size());
                        c.vertices.push_back(x);
                    }
                    if (xi != a && xi != b) splits[i].push_back(xi);
                    if (xi != d && xi != e) splits[j].push_back(xi);
                    changed = true;
                } else if (collinear_overlap(c.vertices, a, b, d, e)) {
                    auto inside = [&](int p, int s0, int s1) {
                        return strictly_inside_segment(c.vertices[p].x, c.vertices[p].y,
                                                       c.vertices[s0].x, c.vertices[s0].y,
                                                       c.vertices[s1].x, c.vertices[s1].y);
                    };
                    if (inside(d, a, b)) splits[i].push_back(d);
                    if (inside(e, a, b)) splits[i].push_back(e);
                    if (inside(a, d, e)) splits[j].push_back(a);
                    if (inside(b, d, e)) splits[j].push_back(b);
                    changed = true;
                }
            }
        }
        // Vertices exactly on a segment interior split it there (this also
        // subdivides border segments at points landing on the frame).
        for (std::size_t i = 0; i < c.segments.size(); ++i) {
            const int a = c.segments[i][0], b = c.segments[i][1];
            for (std::size_t vi = 0; vi < c.vertices.size(); ++vi) {
                const int v = static_cast<int>(vi);
                if (v == a || v == b) continue;
                const Point2& p = c.vertices[vi];
                if (p.x < boxes[i].x0 || p.x > boxes[i].x1 || p.y < boxes[i].y0 ||
                    p.y > boxes[i].y1)
                    continue;
                if (strictly_inside_segment(p.x, p.y, c.vertices[a].x, c.vertices[a].y,
                                            c.vertices[b].x, c.vertices[b].y)) {
                    splits[i].push_back(v);
                    changed = true;
                }
            }
        }

        std::set<SegKey> seen;
        std::vector<std::array<int, 2>> next;
        for (std::size_t i = 0; i < c.segments.size(); ++i) {
            const int a = c.segments[i][0], b = c.segments[i][1];
            std::vector<int> chain{a};
            std::sort(splits[i].begin(), splits[i].end(), [&](int p, int q) {
                return sq_dist(c.vertices[p], c.vertices[a]) <
                       sq_dist(c.vertices[q], c.vertices[a]);
            });
            for (int s : splits[i])
                if (s != chain.back()) chain.push_back(s);
            if (b != chain.back()) chain.push_back(b);
            for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
                const int p = chain[k], q = chain[k + 1];
                if (p == q || c.vertices[p] == c.vertices[q]) continue;
                if (seen.insert(SegKey(p, q)).second) next.push_back({p, q});
            }
        }
        c.segments = std::move(next);
        if (!changed) return;
    }
    throw invariant_error("build_constraints: crossing resolution did not converge");
}

// --------------------------------------------------------------------------
// Incremental CDT: Lawson insertion, then Sloan-style constraint enforcement.

struct Tri {
    std::array<int, 3> v;         // positively oriented
    std::array<int, 3> adj;       // adj[i] shares the edge opposite v[i]
    std::array<uint8_t, 3> con{}; // constraint flag per edge opposite v[i]
};

class Triangulator {
public:
    Triangulator(std::vector<Point2> pts, int width, int height)
        : pts_(std::move(pts)), width_(width), height_(height) {}

    void run(const std::vector<std::array<int, 2>>& segments) {
        init_frame();
        for (int i = 0; i < static_cast<int>(pts_.size()); ++i)
            if (!is_corner_[i]) insert_vertex(i);
        for (const auto& s : segments) insert_segment(s[0], s[1]);
    }

    Mesh2D to_mesh(const std::vector<std::array<int, 2>>& segments) const {
        Mesh2D mesh;
        mesh.width = width_;
        mesh.height = height_;
        mesh.vertices = pts_;
        mesh.segments = segments;
        mesh.faces.reserve(tris_.size());
        for (const Tri& t : tris_) mesh.faces.push_back(t.v);
        return mesh;
    }

private:
    std::vector<Point2> pts_;
    int width_, height_;
    std::vector<Tri> tris_;
    std::vector<int> v2t_;
    std::vector<uint8_t> is_corner_;
    int last_tri_ = 0;

    int orient_idx(int a, int b, int c) const { return orient_pts(pts_[a], pts_[b], pts_[c]); }

    static int index_of(const Tri& t, int v) {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == v) return i;
        throw invariant_error("cdt: vertex not in triangle");
    }

    int shared_edge_index(int n, int t) const {
        for (int i = 0; i < 3; ++i)
            if (tris_[n].adj[i] == t) return i;
        throw invariant_error("cdt: broken adjacency");
    }

    void set_v2t(int t) {
        for (int i = 0; i < 3; ++i) v2t_[tris_[t].v[i]] = t;
    }

    void relink(int n, int old, int t) {
        if (n < 0) return;
        for (int i = 0; i < 3; ++i)
            if (tris_[n].adj[i] == old) {
                tris_[n].adj[i] = t;
                return;
            }
        throw invariant_error("cdt: broken adjacency");
    }

    void init_frame() {
        const Point2 corners[4] = {{0.0, 0.0},
                                   {static_cast<double>(width_), 0.0},
                                   {static_cast<double>(width_), static_cast<double>(height_)},
                                   {0.0, static_cast<double>(height_)}};
        int ci[4];
        for (int k = 0; k < 4; ++k) {
            ci[k] = -1;
            for (std::size_t i = 0; i < pts_.size(); ++i)
                if (pts_[i] == corners[k]) {
                    ci[k] = static_cast<int>(i);
                    break;
                }
            if (ci[k] < 0) throw input_error("triangulate_cdt: image corner vertices missing");
        }
        is_corner_.assign(pts_.size(), 0);
        for (int k = 0; k < 4; ++k) is_corner_[ci[k]] = 1;
        v2t_.assign(pts_.size(), -1);
        // Both seed triangles are positively oriented in image axes.
        tris_.clear();
        tris_.push_back({{ci[0], ci[1], ci[2]}, {-1, 1, -1}, {}});
        tris_.push_back({{ci[0], ci[2], ci[3]}, {-1, -1, 0}, {}});
        set_v2t(0);
        set_v2t(1);
        last_tri_ = 0;
    }

    struct Location {
        int tri = -1;
        int edge = -1; // -1: strictly inside; else the edge the point lies on
    };

    Location classify(int t, const Point2& p, bool& outside, int& exit_edge) const {
        int zero_edge = -1, zeros = 0;
        for (int i = 0; i < 3; ++i) {
            const int u = tris_[t].v[(i + 1) % 3], w = tris_[t].v[(i + 2) % 3];
            const int o = orient_pts(pts_[u], pts_[w], p);
            if (o < 0) {
                outside = true;
                exit_edge = i;
                return {};
            }
            if (o == 0) {
                zero_edge = i;
                ++zeros;
            }
        }
        outside = false;
        if (zeros >= 2) throw input_error("triangulate_cdt: duplicate vertex");
        return {t, zeros == 1 ? zero_edge : -1};
    }

    Location locate(const Point2& p) const {
        int t = last_tri_;
        const std::size_t limit = 4 * tris_.size() + 64;
        for (std::size_t steps = 0; steps < limit; ++steps) {
            bool outside = false;
            int exit_edge = -1;
            const Location loc = classify(t, p, outside, exit_edge);
            if (!outside) return loc;
            const int next = tris_[t].adj[exit_edge];
            if (next < 0) break; // left the frame: numeric trouble, rescan
            t = next;
        }
        for (int ti = 0; ti < static_cast<int>(tris_.size()); ++ti) {
            bool outside = false;
            int exit_edge = -1;
            const Location loc = classify(ti, p, outside, exit_edge);
            if (!outside) return loc;
        }
        throw invariant_error("triangulate_cdt: point outside the frame");
    }

    void insert_vertex(int vi) {
        const Location loc = locate(pts_[vi]);
        std::vector<std::pair<int, int>> suspect; // (tri, edge opposite vi)
        if (loc.edge < 0)
            split_triangle(loc.tri, vi, suspect);
        else
            split_edge(loc.tri, loc.edge, vi, suspect);
        for (auto [t, e] : suspect) legalize(t, e);
        last_tri_ = v2t_[vi];
    }

    void split_triangle(int t, int vi, std::vector<std::pair<int, int>>& suspect) {
        const Tri old = tris_[t];
        const int a = old.v[0], b = old.v[1], c = old.v[2];
        const int t2 = static_cast<int>(tris_.size());
        const int t3 = t2 + 1;
        // t: (a,b,vi), t2: (b,c,vi), t3: (c,a,vi)
        tris_[t] = {{a, b, vi}, {t2, t3, old.adj[2]}, {0, 0, old.con[2]}};
        tris_.push_back({{b, c, vi}, {t3, t, old.adj[0]}, {0, 0, old.con[0]}});
        tris_.push_back({{c, a, vi}, {t, t2, old.adj[1]}, {0, 0, old.con[1]}});
        relink(old.adj[0], t, t2);
        relink(old.adj[1], t, t3);
        set_v2t(t);
        set_v2t(t2);
        set_v2t(t3);
        suspect.insert(suspect.end(), {{t, 2}, {t2, 2}, {t3, 2}});
    }

    void split_edge(int t, int e, int vi, std::vector<std::pair<int, int>>& suspect) {
        const Tri old = tris_[t];
        const int apex = old.v[e], u = old.v[(e + 1) % 3], w = old.v[(e + 2) % 3];
        const int n = old.adj[e];
        const uint8_t con = old.con[e];
        const int t2 = static_cast<int>(tris_.size());
        // t: (apex,u,vi), t2: (apex,vi,w); vi is index 2 resp. 1.
        tris_[t] = {{apex, u, vi}, {-1, t2, old.adj[(e + 2) % 3]}, {con, 0, old.con[(e + 2) % 3]}};
        tris_.push_back(
            {{apex, vi, w}, {-1, old.adj[(e + 1) % 3], t}, {con, old.con[(e + 1) % 3], 0}});
        relink(old.adj[(e + 1) % 3], t, t2);
        set_v2t(t);
        set_v2t(t2);
        suspect.insert(suspect.end(), {{t, 2}, {t2, 1}});
        if (n < 0) return;

        const Tri oldn = tris_[n];
        const int en = [&] {
            for (int i = 0; i < 3; ++i)
                if (oldn.adj[i] == t || oldn.adj[i] == t2) return i;
            throw invariant_error("cdt: broken adjacency");
        }();
        const int napex = oldn.v[en];
        const int n2 = static_cast<int>(tris_.size());
        // n: (napex,w,vi), n2: (napex,vi,u)
        tris_[n] = {{napex, w, vi},
                    {t2, n2, oldn.adj[(en + 2) % 3]},
                    {con, 0, oldn.con[(en + 2) % 3]}};
        tris_.push_back(
            {{napex, vi, u}, {t, oldn.adj[(en + 1) % 3], n}, {con, oldn.con[(en + 1) % 3], 0}});
        relink(oldn.adj[(en + 1) % 3], n, n2);
        tris_[t].adj[0] = n2;
        tris_[t2].adj[0] = n;
        set_v2t(n);
        set_v2t(n2);
        suspect.insert(suspect.end(), {{n, 2}, {n2, 1}});
    }

    /// Lawson legalization: tris_[t].v[e] is the inserted vertex, edge e its
    /// opposite edge. Flips while the neighbor apex violates Delaunay.
    void legalize(int t, int e) {
        const int n = tris_[t].adj[e];
        if (n < 0 || tris_[t].con[e]) return;
        const int vi = tris_[t].v[e];
        const int en = shared_edge_index(n, t);
        const int d = tris_[n].v[en];
        const Point2 &pa = pts_[tris_[t].v[0]], &pb = pts_[tris_[t].v[1]],
                     &pc = pts_[tris_[t].v[2]];
        if (incircle(pa.x, pa.y, pb.x, pb.y, pc.x, pc.y, pts_[d].x, pts_[d].y) > 0) {
            flip(t, e);
            legalize(t, index_of(tris_[t], vi));
            legalize(n, index_of(tris_[n], vi));
        }
    }

    /// Replaces the shared edge (u,w) of t and its neighbor with (p,q).
    /// Caller guarantees the surrounding quad is strictly convex.
    void flip(int t, int e) {
        const int n = tris_[t].adj[e];
        const Tri oldt = tris_[t], oldn = tris_[n];
        const int en = shared_edge_index(n, t);
        const int p = oldt.v[e], u = oldt.v[(e + 1) % 3], w = oldt.v[(e + 2) % 3];
        const int q = oldn.v[en];
        // oldn = (q, w, u) up to rotation: edge (u,q) is opposite w (en+1),
        // edge (q,w) opposite u (en+2).
        // t: (p,u,q), n: (p,q,w)
        tris_[t] = {{p, u, q},
                    {oldn.adj[(en + 1) % 3], n, oldt.adj[(e + 2) % 3]},
                    {oldn.con[(en + 1) % 3], 0, oldt.con[(e + 2) % 3]}};
        tris_[n] = {{p, q, w},
                    {oldn.adj[(en + 2) % 3], oldt.adj[(e + 1) % 3], t},
                    {oldn.con[(en + 2) % 3], oldt.con[(e + 1) % 3], 0}};
        relink(oldn.adj[(en + 1) % 3], n, t);
        relink(oldt.adj[(e + 1) % 3], t, n);
        set_v2t(t);
        set_v2t(n);
    }

    /// Finds (tri, edge-index) for the undirected edge (a,b), or {-1,-1}.
    std::pair<int, int> find_edge(int a, int b) const {
        int found = -1, found_e = -1;
        visit_incident(a, [&](int t) {
            const Tri& tri = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const int u = tri.v[(i + 1) % 3], w = tri.v[(i + 2) % 3];
                if ((u == a && w == b) || (u == b && w == a)) {
                    found = t;
                    found_e = i;
                    return false;
                }
            }
            return true;
        });
        return {found, found_e};
    }

    /// Calls f(tri) for every triangle incident to v until f returns false.
    /// Works for interior fans and hull-bounded fans alike.
    template <typename F>
    void visit_incident(int v, F f) const {
        const int t0 = v2t_[v];
        if (t0 < 0) return;
        int t = t0;
        for (;;) {
            if (!f(t)) return;
            const int i = index_of(tris_[t], v);
            const int next = tris_[t].adj[(i + 1) % 3];
            if (next == t0) return;
            if (next < 0) break;
            t = next;
        }
        t = t0;
        for (;;) {
            const int i = index_of(tris_[t], v);
            const int prev = tris_[t].adj[(i + 2) % 3];
            if (prev < 0 || prev == t0) return;
            t = prev;
            if (!f(t)) return;
        }
    }

    void mark_constrained(int a, int b) {
        const auto [t, e] = find_edge(a, b);
        if (t < 0) throw invariant_error("cdt: constraint edge missing after insertion");
        tris_[t].con[e] = 1;
        const int n = tris_[t].adj[e];
        if (n >= 0) tris_[n].con[shared_edge_index(n, t)] = 1;
    }

    void insert_segment(int a, int b) {
        if (a == b) return;
        if (find_edge(a, b).first >= 0) {
            mark_constrained(a, b);
            return;
        }
        // March from a toward b collecting the crossed edges. Pairs are kept
        // as (left, right) relative to the directed segment a->b.
        std::deque<std::pair<int, int>> crossing;
        int start = -1, start_e = -1;
        visit_incident(a, [&](int t) {
            const int i = index_of(tris_[t], a);
            const int u = tris_[t].v[(i + 1) % 3], w = tris_[t].v[(i + 2) % 3];
            // In positive triangle (a,u,w) the wedge containing b has u on
            // the right of a->b and w on the left.
            if (orient_idx(a, b, u) < 0 && orient_idx(a, b, w) > 0 &&
                segments_properly_cross(pts_[a].x, pts_[a].y, pts_[b].x, pts_[b].y, pts_[u].x,
                                        pts_[u].y, pts_[w].x, pts_[w].y)) {
                start = t;
                start_e = i;
                return false;
            }
            return true;
        });
        if (start < 0) throw invariant_error("cdt: lost constraint corridor start");
        crossing.push_back({tris_[start].v[(start_e + 2) % 3], tris_[start].v[(start_e + 1) % 3]});
        int cur = tris_[start].adj[start_e];
        for (std::size_t guard = 0;; ++guard) {
            if (guard > tris_.size()) throw invariant_error("cdt: corridor march stalled");
            if (cur < 0) throw invariant_error("cdt: constraint corridor left the frame");
            const auto [left, right] = crossing.back();
            int ecur = -1;
            for (int i = 0; i < 3; ++i) {
                const int p = tris_[cur].v[(i + 1) % 3], q = tris_[cur].v[(i + 2) % 3];
                if ((p == left && q == right) || (p == right && q == left)) {
                    ecur = i;
                    break;
                }
            }
            if (ecur < 0) throw invariant_error("cdt: broken corridor");
            const int x = tris_[cur].v[ecur];
            if (x == b) break;
            const int o = orient_idx(a, b, x);
            if (o == 0) throw invariant_error("cdt: vertex exactly on constraint interior");
            const std::pair<int, int> next =
                o > 0 ? std::pair(x, right) : std::pair(left, x);
            int enext = -1;
            for (int i = 0; i < 3; ++i) {
                const int p = tris_[cur].v[(i + 1) % 3], q = tris_[cur].v[(i + 2) % 3];
                if ((p == next.first && q == next.second) || (p == next.second && q == next.first)) {
                    enext = i;
                    break;
                }
            }
            if (enext < 0) throw invariant_error("cdt: broken corridor");
            crossing.push_back(next);
            cur = tris_[cur].adj[enext];
        }

        // Sloan flip loop: flip crossed edges until the constraint appears.
        std::vector<std::pair<int, int>> fresh;
        const std::size_t hard_limit = 1000 + 128 * crossing.size() * crossing.size();
        std::size_t spins = 0;
        while (!crossing.empty()) {
            if (++spins > hard_limit) throw invariant_error("cdt: constraint flip loop stalled");
            const auto [u, w] = crossing.front();
            crossing.pop_front();
            const auto [t, e] = find_edge(u, w);
            if (t < 0) throw invariant_error("cdt: crossing edge vanished");
            if (tris_[t].con[e]) throw invariant_error("triangulate_cdt: crossing constraints");
            const int n = tris_[t].adj[e];
            if (n < 0) throw invariant_error("cdt: crossing edge on hull");
            const int p = tris_[t].v[e];
            const int q = tris_[n].v[shared_edge_index(n, t)];
            const int op = orient_idx(p, q, u), oq = orient_idx(p, q, w);
            if (op == 0 || oq == 0 || op == oq) {
                crossing.push_back({u, w}); // quad not convex yet
                continue;
            }
            flip(t, e);
            if (segments_properly_cross(pts_[a].x, pts_[a].y, pts_[b].x, pts_[b].y, pts_[p].x,
                                        pts_[p].y, pts_[q].x, pts_[q].y))
                crossing.push_back({p, q});
            else if (!(p == a && q == b) && !(p == b && q == a))
                fresh.push_back({p, q});
        }
        mark_constrained(a, b);

        // Restore the Delaunay property among replacement edges.
        std::vector<std::pair<int, int>> stack = fresh;
        const std::size_t restore_limit = 10000 + 100 * tris_.size();
        std::size_t steps = 0;
        while (!stack.empty()) {
            if (++steps > restore_limit)
                throw invariant_error("cdt: delaunay restoration stalled");
            const auto [u, w] = stack.back();
            stack.pop_back();
            const auto [t, e] = find_edge(u, w);
            if (t < 0) continue; // flipped away meanwhile
            if (tris_[t].con[e]) continue;
            const int n = tris_[t].adj[e];
            if (n < 0) continue;
            const int d = tris_[n].v[shared_edge_index(n, t)];
            const int p = tris_[t].v[e];
            const Point2 &pa = pts_[tris_[t].v[0]], &pb = pts_[tris_[t].v[1]],
                         &pc = pts_[tris_[t].v[2]];
            if (incircle(pa.x, pa.y, pb.x, pb.y, pc.x, pc.y, pts_[d].x, pts_[d].y) > 0) {
                flip(t, e);
                stack.insert(stack.end(), {{p, d}, {p, u}, {p, w}, {d, u}, {d, w}});
            }
        }
    }
};

bool all_collinear(const std::vector<Point2>& pts) {
    if (pts.size() < 3) return true;
    std::size_t j = 1;
    while (j < pts.size() && pts[j] == pts[0]) ++j;
    if (j == pts.size()) return true;
    for (std::size_t i = j + 1; i < pts.size(); ++i)
        if (orient_pts(pts[0], pts[j], pts[i]) != 0) return false;
    return true;
}

} // namespace

Constraints build_constraints(const std::vector<Polyline>& polylines, int width, int height,
                              double snap_eps) {
    if (snap_eps < 0.0) throw input_error("build_constraints: snap_eps must be >= 0");
    if (width <= 0 || height <= 0) throw input_error("build_constraints: bad frame size");
    const double w = width, h = height;

    Constraints c;
    c.vertices = {{0.0, 0.0}, {w, 0.0}, {w, h}, {0.0, h}};
    c.segments = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    std::set<SegKey> seen;
    for (const auto& s : c.segments) seen.insert(SegKey(s[0], s[1]));

    for (const Polyline& p : polylines) {
        int prev = -1, first = -1;
        for (const Point2& q : p.points) {
            const Point2 clamped{std::clamp(q.x, 0.0, w), std::clamp(q.y, 0.0, h)};
            int vi = find_near_vertex(c.vertices, clamped, snap_eps);
            if (vi < 0) {
                vi = static_cast<int>(c.vertices.size());
                c.vertices.push_back(clamped);
            }
            if (first < 0) first = vi;
            if (prev >= 0 && prev != vi && seen.insert(SegKey(prev, vi)).second)
                c.segments.push_back({prev, vi});
            prev = vi;
        }
        if (p.closed && prev >= 0 && prev != first && seen.insert(SegKey(prev, first)).second)
            c.segments.push_back({prev, first});
    }

    resolve_constraints(c);
    return c;
}

Mesh2D triangulate_cdt(const Constraints& constraints, int width, int height) {
    if (constraints.vertices.size() < 3 || all_collinear(constraints.vertices))
        throw input_error("triangulate_cdt: need at least 3 non-collinear vertices");

    Constraints work = constraints;
    for (int attempt = 0;; ++attempt) {
        Triangulator tr(work.vertices, width, height);
        tr.run(work.segments);
        Mesh2D mesh = tr.to_mesh(work.segments);

        // Degenerate-face guard: perturb the vertex closest to its opposite
        // edge and retriangulate.
        int offender = -1;
        for (std::size_t f = 0; f < mesh.faces.size() && offender < 0; ++f) {
            if (mesh.face_area(f) > kFaceAreaEps) continue;
            double best_d = std::numeric_limits<double>::max();
            for (int k = 0; k < 3; ++k) {
                const int vi = mesh.faces[f][k];
                if (vi < 4) continue; // never move the frame corners
                const Point2& p = mesh.vertices[vi];
                const Point2& a = mesh.vertices[mesh.faces[f][(k + 1) % 3]];
                const Point2& b = mesh.vertices[mesh.faces[f][(k + 2) % 3]];
                const double d = point_segment_distance(p, a, b);
                if (d < best_d) {
                    best_d = d;
                    offender = vi;
                }
            }
        }
        if (offender < 0) return mesh;
        if (attempt >= kMaxPerturbRetries)
            throw invariant_error("triangulate_cdt: could not eliminate degenerate faces");
        const double angle =
            kTau * std::fmod(0.6180339887498949 * (offender + 1) + 0.37 * attempt, 1.0);
        Point2& p = work.vertices[offender];
        p.x = std::clamp(p.x + 1e-3 * std::cos(angle), 0.0, static_cast<double>(width));
        p.y = std::clamp(p.y + 1e-3 * std::sin(angle), 0.0, static_cast<double>(height));
        resolve_constraints(work);
    }
}

} // namespace tripatch
