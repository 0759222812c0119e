#include "tripatch/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "tripatch/errors.hpp"

namespace tripatch {

TriMesh3D grid_mesh(const DepthMap& depth, const Intrinsics& K) {
    K.validate();
    if (depth.valid_count() < 4) throw input_error("grid_mesh: fewer than 4 valid pixels");

    TriMesh3D mesh;
    std::vector<int> vid(depth.data.size(), -1);
    for (int y = 0; y < depth.height; ++y)
        for (int x = 0; x < depth.width; ++x) {
            if (!depth.valid(x, y)) continue;
            vid[static_cast<std::size_t>(y) * depth.width + x] =
                static_cast<int>(mesh.vertices.size());
            const double z = depth.at(x, y);
            mesh.vertices.push_back({K.u(x + 0.5) * z, K.v(y + 0.5) * z, z});
        }
    for (int y = 0; y + 1 < depth.height; ++y)
        for (int x = 0; x + 1 < depth.width; ++x) {
            const int tl = vid[static_cast<std::size_t>(y) * depth.width + x];
            const int tr = vid[static_cast<std::size_t>(y) * depth.width + x + 1];
            const int bl = vid[static_cast<std::size_t>(y + 1) * depth.width + x];
            const int br = vid[static_cast<std::size_t>(y + 1) * depth.width + x + 1];
            if (tl < 0 || tr < 0 || bl < 0 || br < 0) continue;
            mesh.faces.push_back({tl, tr, br});
            mesh.faces.push_back({tl, br, bl});
        }
    return mesh;
}

namespace {

/// Symmetric 4x4 plane quadric, upper triangle.
struct Quadric {
    double a2 = 0, ab = 0, ac = 0, ad = 0;
    double b2 = 0, bc = 0, bd = 0;
    double c2 = 0, cd = 0;
    double d2 = 0;

    static Quadric from_plane(const Vec3& n, double d, double weight) {
        Quadric q;
        q.a2 = weight * n.x * n.x;
        q.ab = weight * n.x * n.y;
        q.ac = weight * n.x * n.z;
        q.ad = weight * n.x * d;
        q.b2 = weight * n.y * n.y;
        q.bc = weight * n.y * n.z;
        q.bd = weight * n.y * d;
        q.c2 = weight * n.z * n.z;
        q.cd = weight * n.z * d;
        q.d2 = weight * d * d;
        return q;
    }

    Quadric& operator+=(const Quadric& o) {
        a2 += o.a2; ab += o.ab; ac += o.ac; ad += o.ad;
        b2 += o.b2; bc += o.bc; bd += o.bd;
        c2 += o.c2; cd += o.cd;
        d2 += o.d2;
        return *this;
    }

    double eval(const Vec3& p) const {
        return p.x * (a2 * p.x + 2 * (ab * p.y + ac * p.z + ad)) +
               p.y * (b2 * p.y + 2 * (bc * p.z + bd)) + p.z * (c2 * p.z + 2 * cd) + d2;
    }
};

constexpr double kBoundaryWeight = 1e3;

struct EdgeRec {
    double cost;
    int a, b;          // a < b
    int placement;     // 0 = a, 1 = b, 2 = midpoint
    int ver_a, ver_b;

    bool operator>(const EdgeRec& o) const {
        if (cost != o.cost) return cost > o.cost;
        if (a != o.a) return a > o.a;
        if (b != o.b) return b > o.b;
        return placement > o.placement;
    }
};

class Decimator {
public:
    Decimator(const TriMesh3D& mesh, std::size_t target)
        : pos_(mesh.vertices), faces_(mesh.faces), target_(target) {
        const std::size_t nv = pos_.size();
        quad_.resize(nv);
        version_.assign(nv, 0);
        vfaces_.resize(nv);
        boundary_.assign(nv, 0);
        alive_faces_ = faces_.size();

        for (std::size_t f = 0; f < faces_.size(); ++f) {
            for (int k = 0; k < 3; ++k) vfaces_[faces_[f][k]].push_back(static_cast<int>(f));
            Vec3 n;
            double d;
            if (face_plane(f, n, d)) {
                const Quadric q = Quadric::from_plane(n, d, 1.0);
                for (int k = 0; k < 3; ++k) quad_[faces_[f][k]] += q;
            }
        }
        // Boundary edges get perpendicular penalty planes.
        std::map<std::pair<int, int>, std::pair<int, int>> edge_faces; // edge -> (count, face)
        for (std::size_t f = 0; f < faces_.size(); ++f)
            for (int k = 0; k < 3; ++k) {
                const auto key = ordered(faces_[f][k], faces_[f][(k + 1) % 3]);
                auto& slot = edge_faces[key];
                ++slot.first;
                slot.second = static_cast<int>(f);
            }
        for (const auto& [key, slot] : edge_faces) {
            if (slot.first != 1) continue;
            boundary_[key.first] = boundary_[key.second] = 1;
            Vec3 fn;
            double fd;
            if (!face_plane(static_cast<std::size_t>(slot.second), fn, fd)) continue;
            const Vec3 e = pos_[key.second] - pos_[key.first];
            const double elen = norm(e);
            if (elen == 0.0) continue;
            const Vec3 bn = normalized(cross(e / elen, fn));
            const double bd = -dot(bn, pos_[key.first]);
            const Quadric q = Quadric::from_plane(bn, bd, kBoundaryWeight);
            quad_[key.first] += q;
            quad_[key.second] += q;
        }
        for (const auto& [key, slot] : edge_faces) push_edge(key.first, key.second);
    }

    TriMesh3D run() {
        while (alive_faces_ > target_ && !heap_.empty()) {
            const EdgeRec rec = heap_.top();
            heap_.pop();
            if (rec.ver_a != version_[rec.a] || rec.ver_b != version_[rec.b]) continue;
            if (!edge_alive(rec.a, rec.b)) continue;
            try_collapse(rec.a, rec.b);
        }
        return compact();
    }

private:
    std::vector<Vec3> pos_;
    std::vector<std::array<int, 3>> faces_; // dead faces have [0] == -1
    std::size_t target_;
    std::vector<Quadric> quad_;
    std::vector<int> version_;
    std::vector<std::vector<int>> vfaces_;
    std::vector<uint8_t> boundary_;
    std::size_t alive_faces_ = 0;
    std::priority_queue<EdgeRec, std::vector<EdgeRec>, std::greater<EdgeRec>> heap_;

    static std::pair<int, int> ordered(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

    bool face_alive(int f) const { return faces_[f][0] >= 0; }

    bool face_plane(std::size_t f, Vec3& n, double& d) const {
        const Vec3 &p0 = pos_[faces_[f][0]], &p1 = pos_[faces_[f][1]], &p2 = pos_[faces_[f][2]];
        const Vec3 c = cross(p1 - p0, p2 - p0);
        const double len = norm(c);
        if (len == 0.0) return false;
        n = c / len;
        d = -dot(n, p0);
        return true;
    }

    bool edge_alive(int a, int b) const {
        for (int f : vfaces_[a]) {
            if (!face_alive(f)) continue;
            for (int k = 0; k < 3; ++k)
                if (faces_[f][k] == b) return true;
        }
        return false;
    }

    bool is_boundary_edge(int a, int b) const {
        int count = 0;
        for (int f : vfaces_[a]) {
            if (!face_alive(f)) continue;
            bool has_b = false;
            for (int k = 0; k < 3; ++k) has_b |= faces_[f][k] == b;
            if (has_b) ++count;
        }
        return count == 1;
    }

    void push_edge(int a, int b) {
        if (a == b) return;
        const auto [lo, hi] = ordered(a, b);
        double best = std::numeric_limits<double>::max();
        int best_placement = 0;
        for (int placement = 0; placement < 3; ++placement) {
            const Vec3 x = placement_point(lo, hi, placement);
            Quadric q = quad_[lo];
            q += quad_[hi];
            const double cost = q.eval(x);
            if (cost < best) {
                best = cost;
                best_placement = placement;
            }
        }
        heap_.push({best, lo, hi, best_placement, version_[lo], version_[hi]});
    }

    Vec3 placement_point(int a, int b, int placement) const {
        if (placement == 0) return pos_[a];
        if (placement == 1) return pos_[b];
        return (pos_[a] + pos_[b]) * 0.5;
    }

    std::vector<int> link_of(int v) const {
        std::set<int> link;
        for (int f : vfaces_[v]) {
            if (!face_alive(f)) continue;
            for (int k = 0; k < 3; ++k)
                if (faces_[f][k] != v) link.insert(faces_[f][k]);
        }
        return {link.begin(), link.end()};
    }

    /// Manifold guard: shared link vertices must be exactly the apexes of
    /// the faces dying with the edge.
    bool link_condition_ok(int a, int b) const {
        const std::vector<int> la = link_of(a), lb = link_of(b);
        std::vector<int> common;
        std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(),
                              std::back_inserter(common));
        std::size_t dying_apexes = 0;
        for (int f : vfaces_[a]) {
            if (!face_alive(f)) continue;
            bool has_b = false;
            for (int k = 0; k < 3; ++k) has_b |= faces_[f][k] == b;
            if (has_b) ++dying_apexes;
        }
        return common.size() == dying_apexes;
    }

    /// Rejects placements that reverse or degenerate any surviving face.
    bool placement_valid(int a, int b, const Vec3& x) const {
        for (int v : {a, b}) {
            for (int f : vfaces_[v]) {
                if (!face_alive(f)) continue;
                bool dying = false;
                for (int k = 0; k < 3; ++k)
                    dying |= faces_[f][k] == (v == a ? b : a);
                if (dying) continue;
                Vec3 before, after;
                double dd;
                if (!face_plane(f, before, dd)) continue;
                Vec3 p[3];
                for (int k = 0; k < 3; ++k) {
                    const int vv = faces_[f][k];
                    p[k] = (vv == a || vv == b) ? x : pos_[vv];
                }
                const Vec3 c = cross(p[1] - p[0], p[2] - p[0]);
                const double len = norm(c);
                if (len == 0.0) return false;
                after = c / len;
                if (dot(before, after) <= 0.0) return false;
            }
        }
        return true;
    }

    void try_collapse(int a, int b) {
        const bool edge_on_boundary = is_boundary_edge(a, b);
        // Interior chords between boundary vertices pinch the rim; interior
        // edges with one boundary endpoint may only collapse onto it.
        std::vector<int> placements;
        if (edge_on_boundary) {
            placements = {0, 1, 2};
        } else if (boundary_[a] && boundary_[b]) {
            return;
        } else if (boundary_[a]) {
            placements = {0};
        } else if (boundary_[b]) {
            placements = {1};
        } else {
            placements = {0, 1, 2};
        }
        if (!link_condition_ok(a, b)) return;

        Quadric q = quad_[a];
        q += quad_[b];
        std::stable_sort(placements.begin(), placements.end(), [&](int p1, int p2) {
            return q.eval(placement_point(a, b, p1)) < q.eval(placement_point(a, b, p2));
        });
        int chosen = -1;
        for (int p : placements)
            if (placement_valid(a, b, placement_point(a, b, p))) {
                chosen = p;
                break;
            }
        if (chosen < 0) return;

        apply_collapse(a, b, placement_point(a, b, chosen));
    }

    void apply_collapse(int a, int b, const Vec3& x) {
        pos_[a] = x;
        Quadric q = quad_[a];
        q += quad_[b];
        quad_[a] = q;
        ++version_[a];
        ++version_[b];

        for (int f : vfaces_[b]) {
            if (!face_alive(f)) continue;
            bool has_a = false;
            for (int k = 0; k < 3; ++k) has_a |= faces_[f][k] == a;
            if (has_a) {
                faces_[f][0] = -1; // dies with the edge
                --alive_faces_;
            } else {
                for (int k = 0; k < 3; ++k)
                    if (faces_[f][k] == b) faces_[f][k] = a;
                vfaces_[a].push_back(f);
            }
        }
        vfaces_[b].clear();

        // Re-enqueue everything whose cost or validity may have moved: the
        // edges of a's new star and of its link's stars.
        const std::vector<int> link = link_of(a);
        std::set<std::pair<int, int>> touched;
        auto gather = [&](int v) {
            for (int f : vfaces_[v]) {
                if (!face_alive(f)) continue;
                for (int k = 0; k < 3; ++k)
                    touched.insert(ordered(faces_[f][k], faces_[f][(k + 1) % 3]));
            }
        };
        gather(a);
        for (int v : link) gather(v);
        for (const auto& [u, w] : touched) push_edge(u, w);
    }

    TriMesh3D compact() const {
        TriMesh3D out;
        std::vector<int> remap(pos_.size(), -1);
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            if (!face_alive(static_cast<int>(f))) continue;
            std::array<int, 3> tri{};
            for (int k = 0; k < 3; ++k) {
                const int v = faces_[f][k];
                if (remap[v] < 0) {
                    remap[v] = static_cast<int>(out.vertices.size());
                    out.vertices.push_back(pos_[v]);
                }
                tri[k] = remap[v];
            }
            out.faces.push_back(tri);
        }
        return out;
    }
};

} // namespace

TriMesh3D decimate(const TriMesh3D& mesh, std::size_t target_faces) {
    if (target_faces < 4) throw input_error("decimate: target_faces must be >= 4");
    if (mesh.faces.size() <= target_faces) return mesh;
    Decimator dec(mesh, target_faces);
    return dec.run();
}

DepthMap run_baseline(const DepthMap& depth, const Intrinsics& K, std::size_t target_faces,
                      std::pair<TriMesh3D, TriMesh3D>* dump_meshes) {
    TriMesh3D dense = grid_mesh(depth, K);
    TriMesh3D simplified =
        dense.faces.size() > target_faces ? decimate(dense, target_faces) : dense;
    DepthMap rendered = rasterize_mesh3d(simplified, K, depth.width, depth.height);
    if (dump_meshes) *dump_meshes = {std::move(dense), std::move(simplified)};
    return rendered;
}

} // namespace tripatch
