#include "tripatch/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tripatch/errors.hpp"
#include "tripatch/numeric.hpp"
#include "tripatch/parallel.hpp"

namespace tripatch {

PatchRender rasterize_patches(const PatchCloud& cloud) {
    cloud.validate();
    PatchRender out{DepthMap(cloud.width, cloud.height), NormalMap(cloud.width, cloud.height),
                    face_id_map(cloud)};
    if (cloud.faces.empty()) return out;

    std::vector<Vec3> face_normals(cloud.faces.size());
    for (std::size_t f = 0; f < cloud.faces.size(); ++f)
        face_normals[f] = params_to_plane(cloud.faces[f], cloud.intrinsics).normal;

    std::vector<int32_t> bad_face(cloud.height, -1);
    parallel_for(static_cast<std::size_t>(cloud.height), [&](std::size_t y) {
        for (int x = 0; x < cloud.width; ++x) {
            const int32_t f = out.ids.at(x, static_cast<int>(y));
            if (f < 0) continue;
            const double s = cloud.inv_depth_at(f, x + 0.5, y + 0.5);
            if (!(s > 0.0)) {
                bad_face[y] = f;
                return;
            }
            out.depth.at(x, static_cast<int>(y)) = 1.0 / s;
            out.normals.at(x, static_cast<int>(y)) = face_normals[f];
        }
    });
    for (int32_t f : bad_face)
        if (f >= 0)
            throw invariant_error("rasterize_patches: nonpositive inverse depth at face " +
                                  std::to_string(f));
    return out;
}

Vec3 depth_param_gradient(const PatchCloud& cloud, const FaceIdMap& ids, int x, int y) {
    if (x < 0 || y < 0 || x >= ids.width || y >= ids.height)
        throw input_error("depth_param_gradient: pixel out of bounds");
    const int32_t f = ids.at(x, y);
    if (f < 0) throw input_error("depth_param_gradient: uncovered pixel");
    const double s = cloud.inv_depth_at(f, x + 0.5, y + 0.5);
    if (!(s > 0.0)) throw input_error("depth_param_gradient: nonpositive inverse depth");
    const double u = cloud.intrinsics.u(x + 0.5);
    const double v = cloud.intrinsics.v(y + 0.5);
    const double inv_s2 = 1.0 / (s * s);
    return {-u * inv_s2, -v * inv_s2, -inv_s2};
}

namespace {

struct ScreenVertex {
    double x, y, s; // projected pixel coords and inverse depth
};

double edge_fn(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

/// Zero-area ties: an edge owns its boundary pixels when it is a top edge
/// (dy == 0, dx > 0) or a left edge (dy < 0), so adjacent triangles never
/// both claim a shared pixel center.
bool top_left(const ScreenVertex& a, const ScreenVertex& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

} // namespace

DepthMap rasterize_mesh3d(const TriMesh3D& mesh, const Intrinsics& K, int width, int height) {
    K.validate();
    if (width <= 0 || height <= 0) throw input_error("rasterize_mesh3d: bad frame size");
    for (const Vec3& p : mesh.vertices)
        if (!(p.z > 0.0)) throw input_error("rasterize_mesh3d: vertex with nonpositive Z");

    DepthMap out(width, height);
    std::vector<ScreenVertex> proj(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& p = mesh.vertices[i];
        proj[i] = {K.fx * p.x / p.z + K.cx, K.fy * p.y / p.z + K.cy, 1.0 / p.z};
    }

    for (const auto& face : mesh.faces) {
        ScreenVertex v0 = proj[face[0]], v1 = proj[face[1]], v2 = proj[face[2]];
        double area = edge_fn(v0, v1, v2.x, v2.y);
        if (area == 0.0) continue;
        if (area < 0.0) {
            std::swap(v1, v2);
            area = -area;
        }
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min({v0.x, v1.x, v2.x}) - 0.5)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max({v0.x, v1.x, v2.x}))));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min({v0.y, v1.y, v2.y}) - 0.5)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max({v0.y, v1.y, v2.y}))));
        for (int y = y0; y <= y1; ++y) {
            const double py = y + 0.5;
            for (int x = x0; x <= x1; ++x) {
                const double px = x + 0.5;
                const double e0 = edge_fn(v1, v2, px, py);
                const double e1 = edge_fn(v2, v0, px, py);
                const double e2 = edge_fn(v0, v1, px, py);
                const bool in0 = e0 > 0.0 || (e0 == 0.0 && top_left(v1, v2));
                const bool in1 = e1 > 0.0 || (e1 == 0.0 && top_left(v2, v0));
                const bool in2 = e2 > 0.0 || (e2 == 0.0 && top_left(v0, v1));
                if (!in0 || !in1 || !in2) continue;
                const double s = (e0 * v0.s + e1 * v1.s + e2 * v2.s) / area;
                if (!(s > 0.0)) continue;
                const double z = 1.0 / s;
                double& slot = out.at(x, y);
                if (slot == 0.0 || z < slot) slot = z;
            }
        }
    }
    return out;
}

namespace {

void write_obj_vertex(std::ofstream& out, const Vec3& p) {
    out << "v " << format_g17(p.x) << ' ' << format_g17(p.y) << ' ' << format_g17(p.z) << '\n';
}

} // namespace

void export_obj(const PatchCloud& cloud, const std::string& path) {
    cloud.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write OBJ file: " + path);
    for (std::size_t f = 0; f < cloud.faces.size(); ++f) {
        for (const Point2& corner : cloud.faces[f].tri) {
            const double s = cloud.inv_depth_at(f, corner.x, corner.y);
            const double z = 1.0 / s;
            const double u = cloud.intrinsics.u(corner.x);
            const double v = cloud.intrinsics.v(corner.y);
            write_obj_vertex(out, {u * z, v * z, z});
        }
    }
    for (std::size_t f = 0; f < cloud.faces.size(); ++f)
        out << "f " << 3 * f + 1 << ' ' << 3 * f + 2 << ' ' << 3 * f + 3 << '\n';
    if (!out) throw input_error("OBJ write failed: " + path);
}

void export_obj(const TriMesh3D& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write OBJ file: " + path);
    for (const Vec3& p : mesh.vertices) write_obj_vertex(out, p);
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) throw input_error("OBJ write failed: " + path);
}

} // namespace tripatch
