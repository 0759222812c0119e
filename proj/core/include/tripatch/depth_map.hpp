#pragma once

#include <cstddef>
#include <vector>

#include "tripatch/vec3.hpp"

namespace tripatch {

/// Per-pixel depth in meters, row-major. Value 0 encodes an invalid pixel;
/// valid pixels (> 0) form the evaluation domain everywhere downstream.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    DepthMap() = default;
    DepthMap(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool valid(int x, int y) const { return at(x, y) > 0.0; }

    std::size_t valid_count() const {
        std::size_t n = 0;
        for (double d : data)
            if (d > 0.0) ++n;
        return n;
    }
};

/// Per-pixel unit normals in camera coordinates (+z away from the camera, so
/// visible surfaces have z < 0). Invalid pixels hold the zero vector.
struct NormalMap {
    int width = 0;
    int height = 0;
    std::vector<Vec3> data;

    NormalMap() = default;
    NormalMap(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h) {}

    Vec3& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    const Vec3& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool valid(int x, int y) const {
        const Vec3& n = at(x, y);
        return n.x != 0.0 || n.y != 0.0 || n.z != 0.0;
    }
};

} // namespace tripatch
