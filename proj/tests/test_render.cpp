#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "support/oracle.hpp"
#include "support/temp_dir.hpp"
#include "tripatch/cdt.hpp"
#include "tripatch/errors.hpp"
#include "tripatch/parallel.hpp"
#include "tripatch/render.hpp"

using namespace tripatch;

namespace {

Mesh2D random_mesh(int w, int h, int segments, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coord(1.0, w - 1.0);
    std::vector<Polyline> polylines;
    for (int s = 0; s < segments; ++s) {
        Polyline p;
        p.points = {{coord(rng), coord(rng) * h / w}, {coord(rng), coord(rng) * h / w}};
        polylines.push_back(p);
    }
    return triangulate_cdt(build_constraints(polylines, w, h, 1.0), w, h);
}

/// Random cloud with parameters rejected until inverse depth is positive at
/// all corners.
PatchCloud random_cloud(int w, int h, int segments, unsigned seed) {
    const Intrinsics K{1.2 * w, 1.2 * w, w / 2.0 + 0.3, h / 2.0 - 0.2};
    PatchCloud cloud = detach_faces(random_mesh(w, h, segments, seed), K, 2.0);
    std::mt19937 rng(seed * 7 + 1);
    std::uniform_real_distribution<double> ab(-0.25, 0.25);
    std::uniform_real_distribution<double> cc(0.25, 0.9);
    for (std::size_t f = 0; f < cloud.faces.size(); ++f) {
        for (;;) {
            cloud.faces[f].abc = {ab(rng), ab(rng), cc(rng)};
            bool ok = true;
            for (const Point2& corner : cloud.faces[f].tri)
                ok = ok && cloud.inv_depth_at(f, corner.x, corner.y) > 1e-3;
            if (ok) break;
        }
    }
    return cloud;
}

} // namespace

TEST_CASE("constant patch cloud renders constant depth and normals") {
    const Mesh2D mesh = triangulate_cdt(build_constraints({}, 8, 6, 1.0), 8, 6);
    const Intrinsics K{10.0, 10.0, 4.0, 3.0};
    const PatchCloud cloud = detach_faces(mesh, K, 2.0);
    const PatchRender out = rasterize_patches(cloud);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 8; ++x) {
            CHECK(out.depth.at(x, y) == doctest::Approx(2.0).epsilon(1e-15));
            CHECK(out.normals.at(x, y).z == -1.0);
            CHECK(out.ids.at(x, y) >= 0);
        }
}

TEST_CASE("rendered depth follows the inverse-depth formula per pixel") {
    PatchCloud cloud = random_cloud(16, 12, 2, 5);
    const PatchRender out = rasterize_patches(cloud);
    // spot-check a handful of pixels against a direct evaluation
    for (auto [x, y] : {std::pair{1, 1}, {7, 4}, {12, 9}, {3, 10}, {15, 0}}) {
        const int32_t f = out.ids.at(x, y);
        REQUIRE(f >= 0);
        const double u = cloud.intrinsics.u(x + 0.5), v = cloud.intrinsics.v(y + 0.5);
        const auto& [a, b, c] = cloud.faces[f].abc;
        CHECK(out.depth.at(x, y) == doctest::Approx(1.0 / (a * u + b * v + c)).epsilon(1e-12));
    }
}

TEST_CASE("rendered normals equal params_to_plane for every pixel") {
    const PatchCloud cloud = random_cloud(20, 20, 4, 11);
    const PatchRender out = rasterize_patches(cloud);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x) {
            const int32_t f = out.ids.at(x, y);
            REQUIRE(f >= 0);
            const Vec3 n = params_to_plane(cloud.faces[f], cloud.intrinsics).normal;
            CHECK(out.normals.at(x, y) == n);
        }
}

TEST_CASE("invalid patch parameters are rejected naming the face") {
    PatchCloud cloud = random_cloud(8, 8, 0, 2);
    cloud.faces[1].abc = {0.0, 0.0, -0.1};
    try {
        rasterize_patches(cloud);
        FAIL("expected an exception");
    } catch (const input_error& e) {
        CHECK(std::string(e.what()).find("face 1") != std::string::npos);
    }
}

TEST_CASE("depth_param_gradient matches the closed form at the principal point") {
    // cx = 1.5 puts u = 0 exactly at the center of pixel x = 1.
    const Intrinsics K{10.0, 10.0, 1.5, 1.5};
    Mesh2D mesh = triangulate_cdt(build_constraints({}, 4, 4, 1.0), 4, 4);
    PatchCloud cloud = detach_faces(mesh, K, 2.0);
    cloud.intrinsics = K;
    const FaceIdMap ids = face_id_map(cloud);
    const Vec3 g = depth_param_gradient(cloud, ids, 1, 1);
    CHECK(g.x == 0.0);
    CHECK(g.y == 0.0);
    CHECK(g.z == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK_THROWS_AS(depth_param_gradient(cloud, ids, -1, 0), input_error);
}

TEST_CASE("analytic depth gradients match finite differences of the render") {
    PatchCloud cloud = random_cloud(32, 24, 4, 42);
    const FaceIdMap ids = face_id_map(cloud);
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> px(0, 31), py(0, 23);
    const double h = 1e-6;
    int tested = 0;
    while (tested < 200) {
        const int x = px(rng), y = py(rng);
        const int32_t f = ids.at(x, y);
        if (f < 0) continue;
        const Vec3 g = depth_param_gradient(cloud, ids, x, y);
        const double gk[3] = {g.x, g.y, g.z};
        for (int k = 0; k < 3; ++k) {
            PatchCloud lo = cloud, hi = cloud;
            lo.faces[f].abc[k] -= h;
            hi.faces[f].abc[k] += h;
            const double dlo = rasterize_patches(lo).depth.at(x, y);
            const double dhi = rasterize_patches(hi).depth.at(x, y);
            const double fd = (dhi - dlo) / (2.0 * h);
            if (std::abs(fd) < 1e-12) {
                CHECK(std::abs(gk[k]) < 1e-9);
            } else {
                CHECK(std::abs(gk[k] - fd) / std::abs(fd) < 1e-5);
            }
        }
        ++tested;
    }
}

TEST_CASE("gradient is continuous in the parameters") {
    PatchCloud cloud = random_cloud(16, 16, 2, 13);
    const FaceIdMap ids = face_id_map(cloud);
    const int x = 8, y = 8;
    const int32_t f = ids.at(x, y);
    REQUIRE(f >= 0);
    const Vec3 g0 = depth_param_gradient(cloud, ids, x, y);
    PatchCloud nearby = cloud;
    nearby.faces[f].abc[0] += 1e-7;
    nearby.faces[f].abc[2] += 1e-7;
    const Vec3 g1 = depth_param_gradient(nearby, ids, x, y);
    CHECK(std::abs(g0.x - g1.x) < 1e-4);
    CHECK(std::abs(g0.y - g1.y) < 1e-4);
    CHECK(std::abs(g0.z - g1.z) < 1e-4);
}

TEST_CASE("rasterize_mesh3d covers a fronto-parallel quad with constant depth") {
    const int W = 10, H = 8;
    const Intrinsics K{10.0, 10.0, 5.0, 4.0};
    const double z = 3.0;
    TriMesh3D mesh;
    for (auto [x, y] : {std::pair{0.0, 0.0}, {double(W), 0.0}, {double(W), double(H)}, {0.0, double(H)}})
        mesh.vertices.push_back({K.u(x) * z, K.v(y) * z, z});
    mesh.faces = {{0, 1, 2}, {0, 2, 3}};
    const DepthMap d = rasterize_mesh3d(mesh, K, W, H);
    for (double v : d.data) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("z-buffer keeps the nearer surface in the overlap") {
    const int W = 12, H = 12;
    const Intrinsics K{12.0, 12.0, 6.0, 6.0};
    TriMesh3D mesh;
    auto add_quad = [&](double x0, double y0, double x1, double y1, double z) {
        const int base = static_cast<int>(mesh.vertices.size());
        for (auto [x, y] : {std::pair{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}})
            mesh.vertices.push_back({K.u(x) * z, K.v(y) * z, z});
        mesh.faces.push_back({base, base + 1, base + 2});
        mesh.faces.push_back({base, base + 2, base + 3});
    };
    add_quad(0, 0, 12, 12, 3.0);
    add_quad(2, 2, 8, 8, 2.0);
    const DepthMap d = rasterize_mesh3d(mesh, K, W, H);
    CHECK(d.at(4, 4) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.at(10, 10) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("slanted plane rasterizes to analytic ray intersections") {
    const int W = 16, H = 16;
    const Intrinsics K{20.0, 20.0, 8.0, 8.0};
    // plane n.P = dist with P = z*(u, v, 1)  =>  z = dist / (n.(u,v,1))
    const Vec3 n = normalized(Vec3{0.25, -0.15, -1.0});
    const double dist = -2.0; // keeps z positive for this n
    TriMesh3D mesh;
    for (auto [x, y] : {std::pair{-2.0, -2.0}, {18.0, -2.0}, {18.0, 18.0}, {-2.0, 18.0}}) {
        const double u = K.u(x), v = K.v(y);
        const double z = dist / (n.x * u + n.y * v + n.z);
        REQUIRE(z > 0.0);
        mesh.vertices.push_back({u * z, v * z, z});
    }
    mesh.faces = {{0, 1, 2}, {0, 2, 3}};
    const DepthMap d = rasterize_mesh3d(mesh, K, W, H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            REQUIRE(d.valid(x, y));
            const double u = K.u(x + 0.5), v = K.v(y + 0.5);
            const double expect = dist / (n.x * u + n.y * v + n.z);
            CHECK(std::abs(d.at(x, y) - expect) < 1e-6);
        }
}

TEST_CASE("top-left fill rule claims shared edges exactly once") {
    const int W = 8, H = 8;
    const Intrinsics K{8.0, 8.0, 4.0, 4.0};
    const double z = 2.0;
    // two triangles sharing the diagonal through pixel centers
    TriMesh3D mesh;
    for (auto [x, y] : {std::pair{0.0, 0.0}, {8.0, 0.0}, {8.0, 8.0}, {0.0, 8.0}})
        mesh.vertices.push_back({K.u(x) * z, K.v(y) * z, z});
    TriMesh3D upper{mesh.vertices, {{0, 1, 2}}};
    TriMesh3D lower{mesh.vertices, {{0, 2, 3}}};
    const DepthMap du = rasterize_mesh3d(upper, K, W, H);
    const DepthMap dl = rasterize_mesh3d(lower, K, W, H);
    for (int k = 0; k < 8; ++k) {
        const bool in_upper = du.valid(k, k);
        const bool in_lower = dl.valid(k, k);
        CHECK(in_upper != in_lower); // exactly one claims the diagonal center
    }
}

TEST_CASE("empty 3D mesh renders an all-invalid map") {
    const DepthMap d = rasterize_mesh3d({}, {10, 10, 4, 4}, 8, 8);
    CHECK(d.valid_count() == 0);
    TriMesh3D bad;
    bad.vertices.push_back({0.0, 0.0, -1.0});
    CHECK_THROWS_AS(rasterize_mesh3d(bad, {10, 10, 4, 4}, 8, 8), input_error);
}

TEST_CASE("OBJ export writes 3M vertices and M faces") {
    testutil::TempDir dir;
    const Mesh2D mesh = triangulate_cdt(build_constraints({}, 6, 6, 1.0), 6, 6);
    const Intrinsics K{10.0, 10.0, 3.0, 3.0};
    const PatchCloud cloud = detach_faces(mesh, K, 2.0);
    const std::string path = dir.file("cloud.obj");
    export_obj(cloud, path);
    std::ifstream in(path);
    std::string line;
    int v_lines = 0, f_lines = 0;
    bool all_z_two = true;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) {
            ++v_lines;
            std::istringstream ss(line.substr(2));
            double x, y, z;
            ss >> x >> y >> z;
            all_z_two = all_z_two && z == 2.0;
        } else if (line.rfind("f ", 0) == 0) {
            ++f_lines;
        }
    }
    CHECK(v_lines == 6);
    CHECK(f_lines == 2);
    CHECK(all_z_two);
}

TEST_CASE("re-rendering the exported OBJ reproduces the patch render") {
    testutil::TempDir dir;
    const PatchCloud cloud = random_cloud(32, 28, 5, 21);
    const PatchRender direct = rasterize_patches(cloud);
    const std::string path = dir.file("cloud.obj");
    export_obj(cloud, path);
    const TriMesh3D mesh = oracle::read_obj(path);
    CHECK(mesh.vertices.size() == 3 * cloud.face_count());
    const DepthMap re = rasterize_mesh3d(mesh, cloud.intrinsics, cloud.width, cloud.height);
    std::size_t compared = 0;
    for (std::size_t i = 0; i < re.data.size(); ++i) {
        if (!(re.data[i] > 0.0) || !(direct.depth.data[i] > 0.0)) continue;
        ++compared;
        CHECK(std::abs(re.data[i] - direct.depth.data[i]) < 1e-5);
    }
    CHECK(compared > re.data.size() * 9 / 10);
}

TEST_CASE("rasterization is identical across thread counts") {
    const PatchCloud cloud = random_cloud(48, 36, 6, 3);
    set_thread_count(1);
    const PatchRender a = rasterize_patches(cloud);
    set_thread_count(8);
    const PatchRender b = rasterize_patches(cloud);
    set_thread_count(1);
    CHECK(a.depth.data == b.depth.data);
    CHECK(a.ids.data == b.ids.data);
    for (std::size_t i = 0; i < a.normals.data.size(); ++i)
        CHECK(a.normals.data[i] == b.normals.data[i]);
}
