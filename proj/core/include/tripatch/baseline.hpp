#pragma once

#include "tripatch/render.hpp"

namespace tripatch {

/// Dense mesh from a depth map: one vertex per valid pixel back-projected at
/// its center, two triangles per 2x2 cell whose four pixels are all valid
/// (diagonal top-left to bottom-right). Cells touching holes produce no
/// faces; a map with valid pixels but no complete cell yields empty faces.
TriMesh3D grid_mesh(const DepthMap& depth, const Intrinsics& K);

/// Quadric edge-collapse decimation down to at most target_faces (at least
/// target_faces - 2 when reachable). Collapse placement is restricted to
/// {endpoint A, endpoint B, midpoint}, cheapest valid first; collapses that
/// flip a surviving face or pinch the topology are rejected; boundary edges
/// carry a heavy penalty quadric and interior edges never pull a boundary
/// vertex inward. Returns the input unchanged when it already has at most
/// target_faces faces; stops early (reporting by the achieved face count)
/// when no legal collapse remains.
TriMesh3D decimate(const TriMesh3D& mesh, std::size_t target_faces);

/// The naive pipeline: grid_mesh, decimate to target_faces, re-render at the
/// input's resolution. `dump_meshes` (optional) receives the dense and the
/// decimated mesh for OBJ export.
DepthMap run_baseline(const DepthMap& depth, const Intrinsics& K, std::size_t target_faces,
                      std::pair<TriMesh3D, TriMesh3D>* dump_meshes = nullptr);

} // namespace tripatch
