#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tripatch/intrinsics.hpp"
#include "tripatch/mesh2d.hpp"
#include "tripatch/vec3.hpp"

namespace tripatch {

/// One detached triangular patch: an immutable 2D footprint plus the three
/// parameters (a,b,c) of its inverse-depth plane. Over normalized camera
/// coordinates u,v the surface is z(u,v) = 1/(a*u + b*v + c), which is the
/// 3D plane a*X + b*Y + c*Z = 1; rendered inverse depth is affine across the
/// footprint and all parameter gradients are closed-form.
struct Patch {
    std::array<Point2, 3> tri;
    std::array<double, 3> abc;
};

struct PatchCloud {
    int width = 0;
    int height = 0;
    Intrinsics intrinsics;
    std::vector<Patch> faces;

    std::size_t face_count() const { return faces.size(); }
    /// 3 per face: the representation's entire parameter budget.
    std::size_t param_count() const { return 3 * faces.size(); }

    /// Inverse depth of face f at image point (x, y).
    double inv_depth_at(std::size_t f, double x, double y) const {
        const auto& [a, b, c] = faces[f].abc;
        return a * intrinsics.u(x) + b * intrinsics.v(y) + c;
    }

    /// Checks s > 0 at all three corners of every face.
    void validate() const;
};

/// Per-pixel owning face index; -1 marks uncovered pixels.
struct FaceIdMap {
    int width = 0;
    int height = 0;
    std::size_t face_count = 0;
    std::vector<int32_t> data;

    FaceIdMap() = default;
    FaceIdMap(int w, int h, std::size_t faces)
        : width(w), height(h), face_count(faces), data(static_cast<std::size_t>(w) * h, -1) {}

    int32_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Dense per-pixel feature vectors. Samples live on the integer lattice:
/// the value of pixel (x, y) sits at position (x, y) for interpolation.
struct FeatureMap {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

/// M x C reduction of a feature map onto faces.
struct FaceFeatures {
    std::size_t face_count = 0;
    int channels = 0;
    std::vector<double> values;       // row-major M x C
    std::vector<uint8_t> empty_faces; // faces that owned zero pixels

    double at(std::size_t face, int c) const { return values[face * channels + c]; }
};

/// Detaches every mesh face into an independent patch initialized to the
/// fronto-parallel plane (0, 0, 1/init_depth). An empty mesh yields an empty
/// cloud (M = 0); downstream operations accept it.
PatchCloud detach_faces(const Mesh2D& mesh, const Intrinsics& K, double init_depth);

struct PlaneView {
    Vec3 normal;          // unit, z < 0 toward the camera
    double centroid_depth; // meters at the 2D triangle centroid
};

/// Derived plane view of a patch: normal = -(a,b,c)/|(a,b,c)| and the depth
/// at the footprint centroid. Scaling (a,b,c) by t > 0 keeps the normal and
/// divides depths by t.
PlaneView params_to_plane(const Patch& face, const Intrinsics& K);

/// Owner of every pixel: the face containing the pixel center (x+0.5, y+0.5),
/// ties on shared edges/vertices going to the lowest face index. Exact
/// predicates; throws invariant_error if any pixel ends up uncovered.
FaceIdMap face_id_map(const Mesh2D& mesh);

/// Same ownership rule over a patch cloud's footprints (identical geometry
/// when the cloud came from the mesh). M = 0 yields an all-uncovered map.
FaceIdMap face_id_map(const PatchCloud& cloud);

/// Channel-wise max over each face's pixel region. Faces owning zero pixels
/// get a zero row and an empty flag.
FaceFeatures superpixel_pool(const FeatureMap& f, const FaceIdMap& ids);

/// Bilinear sample of the feature map at each face's 2D triangle centroid.
/// Sampling coordinates clamp to the lattice [0,W-1]x[0,H-1]; a centroid
/// outside the image rectangle is an error.
FaceFeatures centroid_sample(const FeatureMap& f, const PatchCloud& cloud);

/// {width, height, intrinsics, faces:[{tri:[[x,y]*3], abc:[a,b,c]},...]}
PatchCloud load_patch_cloud_json(const std::string& path);
void save_patch_cloud_json(const PatchCloud& cloud, const std::string& path);

} // namespace tripatch
