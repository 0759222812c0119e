#include "tripatch/normals.hpp"

#include "tripatch/errors.hpp"

namespace tripatch {

namespace {
Vec3 back_project(const DepthMap& depth, const Intrinsics& K, int x, int y) {
    const double z = depth.at(x, y);
    const double u = K.u(x + 0.5);
    const double v = K.v(y + 0.5);
    return {u * z, v * z, z};
}
} // namespace

NormalMap normals_from_depth(const DepthMap& depth, const Intrinsics& K) {
    K.validate();
    if (depth.valid_count() == 0)
        throw input_error("normals_from_depth: depth map has no valid pixels");
    NormalMap normals(depth.width, depth.height);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            if (x < 1 || y < 1 || x + 1 >= depth.width || y + 1 >= depth.height) continue;
            if (!depth.valid(x, y) || !depth.valid(x - 1, y) || !depth.valid(x + 1, y) ||
                !depth.valid(x, y - 1) || !depth.valid(x, y + 1))
                continue;
            const Vec3 tu = back_project(depth, K, x + 1, y) - back_project(depth, K, x - 1, y);
            const Vec3 tv = back_project(depth, K, x, y + 1) - back_project(depth, K, x, y - 1);
            Vec3 n = cross(tu, tv);
            const double len = norm(n);
            if (len == 0.0) continue;
            n = n / len;
            if (n.z > 0.0) n = -n;
            if (n.z == 0.0) continue;
            normals.at(x, y) = n;
        }
    }
    return normals;
}

} // namespace tripatch
