#pragma once

#include "tripatch/depth_map.hpp"
#include "tripatch/intrinsics.hpp"

namespace tripatch {

/// Ground-truth normals by central differences of back-projected points.
/// Pixel (x, y) back-projects at its center (x+0.5, y+0.5). A pixel needs all
/// four orthogonal neighbors valid (and in bounds); otherwise its normal is
/// invalid. Normals are unit length with the sign flipped so z < 0; the rare
/// exactly-edge-on surface (z == 0) is marked invalid.
NormalMap normals_from_depth(const DepthMap& depth, const Intrinsics& K);

} // namespace tripatch
