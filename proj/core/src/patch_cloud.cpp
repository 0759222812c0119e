#include "tripatch/patch_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "json_fmt.hpp"
#include "tripatch/errors.hpp"
#include "tripatch/geom_predicates.hpp"
#include "tripatch/parallel.hpp"

namespace tripatch {

namespace {

Point2 centroid_of(const std::array<Point2, 3>& tri) {
    return {(tri[0].x + tri[1].x + tri[2].x) / 3.0, (tri[0].y + tri[1].y + tri[2].y) / 3.0};
}

bool point_in_closed_tri(const std::array<Point2, 3>& t, double px, double py) {
    return orient2d(t[0].x, t[0].y, t[1].x, t[1].y, px, py) >= 0 &&
           orient2d(t[1].x, t[1].y, t[2].x, t[2].y, px, py) >= 0 &&
           orient2d(t[2].x, t[2].y, t[0].x, t[0].y, px, py) >= 0;
}

FaceIdMap build_face_id_map(int width, int height, const std::vector<std::array<Point2, 3>>& tris,
                            bool require_coverage) {
    FaceIdMap ids(width, height, tris.size());
    if (tris.empty()) {
        if (require_coverage && width > 0 && height > 0)
            throw invariant_error("face_id_map: empty mesh cannot cover the frame");
        return ids;
    }

    // Bucket candidate faces per scanline; the outer loop runs in face order
    // so each bucket stays sorted and the first hit is the lowest index.
    std::vector<std::vector<int32_t>> rows(height);
    for (std::size_t f = 0; f < tris.size(); ++f) {
        const auto& t = tris[f];
        const double ymin = std::min({t[0].y, t[1].y, t[2].y});
        const double ymax = std::max({t[0].y, t[1].y, t[2].y});
        const int y0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(ymax)));
        for (int y = y0; y <= y1; ++y)
            if (y + 0.5 >= ymin && y + 0.5 <= ymax) rows[y].push_back(static_cast<int32_t>(f));
    }

    std::vector<uint8_t> uncovered(height, 0);
    parallel_for(static_cast<std::size_t>(height), [&](std::size_t y) {
        for (int x = 0; x < width; ++x) {
            const double px = x + 0.5, py = static_cast<double>(y) + 0.5;
            int32_t owner = -1;
            for (int32_t f : rows[y]) {
                const auto& t = tris[f];
                if (px < std::min({t[0].x, t[1].x, t[2].x}) ||
                    px > std::max({t[0].x, t[1].x, t[2].x}))
                    continue;
                if (point_in_closed_tri(t, px, py)) {
                    owner = f;
                    break;
                }
            }
            ids.data[y * width + x] = owner;
            if (owner < 0) uncovered[y] = 1;
        }
    });
    if (require_coverage)
        for (int y = 0; y < height; ++y)
            if (uncovered[y])
                throw invariant_error("face_id_map: pixel center not covered by any face");
    return ids;
}

} // namespace

void PatchCloud::validate() const {
    intrinsics.validate();
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (const Point2& corner : faces[f].tri)
            if (!(inv_depth_at(f, corner.x, corner.y) > 0.0))
                throw input_error("PatchCloud: nonpositive inverse depth at corner of face " +
                                  std::to_string(f));
}

PatchCloud detach_faces(const Mesh2D& mesh, const Intrinsics& K, double init_depth) {
    if (!(init_depth > 0.0)) throw input_error("detach_faces: init_depth must be > 0");
    K.validate();
    PatchCloud cloud;
    cloud.width = mesh.width;
    cloud.height = mesh.height;
    cloud.intrinsics = K;
    cloud.faces.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces)
        cloud.faces.push_back(Patch{{mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]},
                                    {0.0, 0.0, 1.0 / init_depth}});
    return cloud;
}

PlaneView params_to_plane(const Patch& face, const Intrinsics& K) {
    const auto& [a, b, c] = face.abc;
    const double len = std::sqrt(a * a + b * b + c * c);
    if (len == 0.0) throw input_error("params_to_plane: zero parameter vector");
    const Point2 g = centroid_of(face.tri);
    const double s = a * K.u(g.x) + b * K.v(g.y) + c;
    return {Vec3{-a / len, -b / len, -c / len}, 1.0 / s};
}

FaceIdMap face_id_map(const Mesh2D& mesh) {
    std::vector<std::array<Point2, 3>> tris;
    tris.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces)
        tris.push_back({mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]});
    return build_face_id_map(mesh.width, mesh.height, tris, true);
}

FaceIdMap face_id_map(const PatchCloud& cloud) {
    std::vector<std::array<Point2, 3>> tris;
    tris.reserve(cloud.faces.size());
    for (const Patch& p : cloud.faces) tris.push_back(p.tri);
    return build_face_id_map(cloud.width, cloud.height, tris, false);
}

FaceFeatures superpixel_pool(const FeatureMap& f, const FaceIdMap& ids) {
    if (f.width != ids.width || f.height != ids.height)
        throw input_error("superpixel_pool: dimension mismatch");
    FaceFeatures out;
    out.face_count = ids.face_count;
    out.channels = f.channels;
    out.values.assign(out.face_count * f.channels, 0.0);
    out.empty_faces.assign(out.face_count, 1);
    std::vector<uint8_t> seen(out.face_count, 0);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            const int32_t id = ids.at(x, y);
            if (id < 0) continue;
            for (int c = 0; c < f.channels; ++c) {
                double& slot = out.values[static_cast<std::size_t>(id) * f.channels + c];
                const double v = f.at(x, y, c);
                slot = seen[id] ? std::max(slot, v) : v;
            }
            seen[id] = 1;
            out.empty_faces[id] = 0;
        }
    return out;
}

FaceFeatures centroid_sample(const FeatureMap& f, const PatchCloud& cloud) {
    if (f.width != cloud.width || f.height != cloud.height)
        throw input_error("centroid_sample: dimension mismatch");
    FaceFeatures out;
    out.face_count = cloud.face_count();
    out.channels = f.channels;
    out.values.assign(out.face_count * f.channels, 0.0);
    out.empty_faces.assign(out.face_count, 0);
    for (std::size_t m = 0; m < cloud.faces.size(); ++m) {
        const Point2 g = centroid_of(cloud.faces[m].tri);
        if (g.x < 0.0 || g.x > cloud.width || g.y < 0.0 || g.y > cloud.height)
            throw input_error("centroid_sample: centroid outside image bounds");
        const double sx = std::clamp(g.x, 0.0, static_cast<double>(f.width - 1));
        const double sy = std::clamp(g.y, 0.0, static_cast<double>(f.height - 1));
        const int x0 = std::min(static_cast<int>(sx), f.width - 2 >= 0 ? f.width - 2 : 0);
        const int y0 = std::min(static_cast<int>(sy), f.height - 2 >= 0 ? f.height - 2 : 0);
        const int x1 = std::min(x0 + 1, f.width - 1);
        const int y1 = std::min(y0 + 1, f.height - 1);
        const double tx = sx - x0, ty = sy - y0;
        for (int c = 0; c < f.channels; ++c) {
            const double top = (1.0 - tx) * f.at(x0, y0, c) + tx * f.at(x1, y0, c);
            const double bot = (1.0 - tx) * f.at(x0, y1, c) + tx * f.at(x1, y1, c);
            out.values[m * f.channels + c] = (1.0 - ty) * top + ty * bot;
        }
    }
    return out;
}

PatchCloud load_patch_cloud_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open patch-cloud file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("patch-cloud JSON parse error: " + std::string(e.what()));
    }
    PatchCloud cloud;
    try {
        cloud.width = j.at("width").get<int>();
        cloud.height = j.at("height").get<int>();
        const auto& k = j.at("intrinsics");
        cloud.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(),
                            k.at("cx").get<double>(), k.at("cy").get<double>()};
        for (const auto& fj : j.at("faces")) {
            Patch p;
            const auto& tri = fj.at("tri");
            for (int i = 0; i < 3; ++i)
                p.tri[i] = {tri.at(i).at(0).get<double>(), tri.at(i).at(1).get<double>()};
            const auto& abc = fj.at("abc");
            p.abc = {abc.at(0).get<double>(), abc.at(1).get<double>(), abc.at(2).get<double>()};
            cloud.faces.push_back(p);
        }
    } catch (const nlohmann::json::exception& e) {
        throw input_error("patch-cloud JSON schema error: " + std::string(e.what()));
    }
    cloud.validate();
    return cloud;
}

void save_patch_cloud_json(const PatchCloud& cloud, const std::string& path) {
    nlohmann::json j;
    j["width"] = cloud.width;
    j["height"] = cloud.height;
    j["intrinsics"] = {{"fx", cloud.intrinsics.fx},
                       {"fy", cloud.intrinsics.fy},
                       {"cx", cloud.intrinsics.cx},
                       {"cy", cloud.intrinsics.cy}};
    auto& faces = j["faces"] = nlohmann::json::array();
    for (const Patch& p : cloud.faces) {
        nlohmann::json fj;
        fj["tri"] = {{p.tri[0].x, p.tri[0].y}, {p.tri[1].x, p.tri[1].y}, {p.tri[2].x, p.tri[2].y}};
        fj["abc"] = {p.abc[0], p.abc[1], p.abc[2]};
        faces.push_back(fj);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write patch-cloud file: " + path);
    out << detail::dump_json_fixed(j);
}

} // namespace tripatch
