#pragma once

#include <string>

#include "tripatch/depth_map.hpp"
#include "tripatch/patch_cloud.hpp"

namespace tripatch {

/// Indexed triangle soup in camera coordinates (meters).
struct TriMesh3D {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
};

struct PatchRender {
    DepthMap depth;
    NormalMap normals;
    FaceIdMap ids;
};

/// Rasterizes a patch cloud at pixel centers: each pixel's owner comes from
/// face_id_map (lowest face index on boundary ties), depth is 1/(a*u+b*v+c)
/// there, and the normal is the owner's plane normal. Because footprints are
/// fixed 2D triangles, this render is differentiable in the parameters in
/// closed form. Throws invariant_error naming the face if a covered pixel
/// has nonpositive inverse depth. An empty cloud renders all-invalid maps.
PatchRender rasterize_patches(const PatchCloud& cloud);

/// d(depth)/d(a,b,c) of the face owning the pixel: (-u/s^2, -v/s^2, -1/s^2)
/// with s its inverse depth at the pixel center. Errors on uncovered pixels.
Vec3 depth_param_gradient(const PatchCloud& cloud, const FaceIdMap& ids, int x, int y);

/// Software z-buffer rasterizer: perspective projection through K, top-left
/// fill rule at pixel centers, inverse depth interpolated linearly in screen
/// space (perspective-correct), per-pixel minimum depth. Pixels covered by
/// no triangle stay invalid. Requires Z > 0 for every vertex.
DepthMap rasterize_mesh3d(const TriMesh3D& mesh, const Intrinsics& K, int width, int height);

/// Wavefront OBJ with 3M vertices (corner back-projections X=u*z, Y=v*z,
/// Z=z; vertices duplicated per face, patches stay independent) and M faces.
void export_obj(const PatchCloud& cloud, const std::string& path);

/// OBJ export of a plain 3D mesh (baseline dumps).
void export_obj(const TriMesh3D& mesh, const std::string& path);

} // namespace tripatch
