#include <doctest.h>

#include <cmath>

#include "tripatch/errors.hpp"
#include "tripatch/normals.hpp"

using namespace tripatch;

TEST_CASE("fronto-parallel plane gives (0,0,-1) everywhere valid") {
    DepthMap d(12, 10, 2.0);
    const Intrinsics K{100.0, 100.0, 6.0, 5.0};
    const NormalMap n = normals_from_depth(d, K);
    int valid = 0;
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 12; ++x) {
            if (!n.valid(x, y)) continue;
            ++valid;
            CHECK(n.at(x, y).x == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(n.at(x, y).y == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(n.at(x, y).z == doctest::Approx(-1.0).epsilon(1e-12));
        }
    CHECK(valid == 10 * 8); // one-pixel border is invalid
}

TEST_CASE("ramp depth matches the symbolic surface normal") {
    // z = 1 + 0.001 * x_px sampled at pixel centers; the back-projected
    // surface is P(u,v) = (u z, v z, z) with z affine in u, so the exact
    // normal is cross(dP/du, dP/dv) evaluated symbolically per pixel.
    const int W = 40, H = 30;
    const Intrinsics K{100.0, 100.0, W / 2.0, H / 2.0};
    DepthMap d(W, H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) d.at(x, y) = 1.0 + 0.001 * (x + 0.5);
    const NormalMap n = normals_from_depth(d, K);

    const double zu = 0.001 * K.fx; // dz/du
    for (int y = 1; y + 1 < H; ++y)
        for (int x = 1; x + 1 < W; ++x) {
            REQUIRE(n.valid(x, y));
            const double u = K.u(x + 0.5), v = K.v(y + 0.5);
            const double z = d.at(x, y);
            const Vec3 tu{z + u * zu, v * zu, zu};
            const Vec3 tv{0.0, z, 0.0};
            Vec3 expect = normalized(cross(tu, tv));
            if (expect.z > 0.0) expect = -expect;
            CHECK(std::abs(n.at(x, y).x - expect.x) < 1e-3);
            CHECK(std::abs(n.at(x, y).y - expect.y) < 1e-3);
            CHECK(std::abs(n.at(x, y).z - expect.z) < 1e-3);
        }
}

TEST_CASE("isolated valid pixel gets no normal") {
    DepthMap d(7, 7);
    d.at(3, 3) = 2.0;
    const Intrinsics K{50.0, 50.0, 3.5, 3.5};
    const NormalMap n = normals_from_depth(d, K);
    CHECK_FALSE(n.valid(3, 3));
}

TEST_CASE("normals are unit length at every valid pixel") {
    const int W = 24, H = 24;
    DepthMap d(W, H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            d.at(x, y) = 2.0 + 0.3 * std::sin(0.4 * x) + 0.2 * std::cos(0.3 * y);
    d.at(5, 5) = 0.0; // poke a hole
    const Intrinsics K{80.0, 80.0, 12.0, 12.0};
    const NormalMap n = normals_from_depth(d, K);
    int valid = 0;
    for (const Vec3& v : n.data) {
        if (v.x == 0.0 && v.y == 0.0 && v.z == 0.0) continue;
        ++valid;
        CHECK(std::abs(norm(v) - 1.0) < 1e-6);
        CHECK(v.z < 0.0);
    }
    CHECK(valid > 0);
    // the hole invalidates its 4-neighborhood
    CHECK_FALSE(n.valid(5, 5));
    CHECK_FALSE(n.valid(4, 5));
    CHECK_FALSE(n.valid(6, 5));
    CHECK_FALSE(n.valid(5, 4));
    CHECK_FALSE(n.valid(5, 6));
}

TEST_CASE("all-invalid depth map is rejected") {
    DepthMap d(4, 4);
    const Intrinsics K{10.0, 10.0, 2.0, 2.0};
    CHECK_THROWS_AS(normals_from_depth(d, K), input_error);
}
