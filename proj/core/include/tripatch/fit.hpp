#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tripatch/depth_map.hpp"
#include "tripatch/patch_cloud.hpp"

namespace tripatch {

enum class DepthTerm {
    L1,        // mean |D - D*| (default reading)
    SignedMean // mean (D - D*) verbatim; unbounded below, kept for experiments
};

struct FitConfig {
    double lambda_n = 0.5; // normal-term weight
    int iterations = 500;
    double step_size = 1e-2;
    DepthTerm depth_term = DepthTerm::L1;
    double init_depth = 2.0; // meters

    void validate() const;
};

struct LossValue {
    double sum = 0.0;    // depth + lambda_n * normal
    double depth = 0.0;
    double normal = 0.0;
};

/// The fitting objective over pixels valid in both the ground truth and the
/// render (n = their count): depth term per cfg.depth_term, normal term
/// -(1/n) sum N.N*. Ground-truth normals that are invalid contribute zero to
/// the dot products; with lambda_n == 0 the normal map is never read (it may
/// be empty). Throws input_error when the valid overlap is empty.
LossValue loss(const PatchCloud& cloud, const DepthMap& gt_depth, const NormalMap& gt_normals,
               const FitConfig& cfg);

/// Exact gradient of the implemented loss, one (a,b,c) row per face. The
/// |.| subgradient at zero residual is 0. Rows of faces owning no valid
/// pixel are zero.
std::vector<std::array<double, 3>> loss_gradient(const PatchCloud& cloud,
                                                 const DepthMap& gt_depth,
                                                 const NormalMap& gt_normals,
                                                 const FitConfig& cfg);

struct FitResult {
    PatchCloud cloud;
    std::vector<LossValue> trace; // entry i = loss after i updates (0..iterations)
};

/// Detaches the mesh and runs `iterations` steps of per-parameter adaptive
/// descent (Adam with a linear step decay to 10%), projecting each face back
/// to inverse depth >= 1e-3 at its corners after every step. Pixel ownership
/// is fixed by the 2D footprints, so faces are independent: `active` (when
/// given) freezes the faces marked 0 without changing anything else, and the
/// result is deterministic and thread-count independent.
FitResult fit(const Mesh2D& mesh, const DepthMap& gt_depth, const NormalMap& gt_normals,
              const Intrinsics& K, const FitConfig& cfg,
              const std::vector<uint8_t>* active = nullptr);

/// CSV trace: header then one "iteration,L_sum,L_depth,L_normal" row each.
void save_loss_trace_csv(const std::vector<LossValue>& trace, const std::string& path);

} // namespace tripatch
