#pragma once

#include <cstddef>
#include <string>

#include "tripatch/depth_map.hpp"

namespace tripatch {

struct MetricsReport {
    double rel = 0.0;     // mean |p-g|/g
    double rms = 0.0;     // sqrt(mean (p-g)^2), meters
    double log10 = 0.0;   // mean |log10 p - log10 g|
    double delta1 = 0.0;  // fraction with max(p/g, g/p) < 1.25
    double delta2 = 0.0;  // ... < 1.25^2
    double delta3 = 0.0;  // ... < 1.25^3
    std::size_t n_valid = 0;
    std::size_t n_params = 0;      // filled in by the caller when known
    std::size_t n_pred_invalid = 0; // warning counter, not serialized
};

/// Depth metrics over the pixels where both maps are valid (> 0). Pixels
/// where the ground truth is valid but the prediction is not are counted as
/// delta failures and enter rel/rms with prediction 0, but are excluded from
/// log10 and tallied in n_pred_invalid. Delta thresholds compare with strict
/// '<' (an exact ratio of 1.25 fails delta1). Errors when no pixel is valid
/// in both maps. Reductions use pairwise summation.
MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt);

enum class ParamKind { Pointcloud, Patchcloud };

/// Table-style parameter accounting: 3 per pixel for a point cloud, 3 per
/// face for a patch cloud.
std::size_t param_count(ParamKind kind, std::size_t size);

/// JSON object with exactly: rel, rms, log10, delta1, delta2, delta3,
/// n_valid, n_params.
void save_metrics_json(const MetricsReport& report, const std::string& path);
std::string metrics_to_json(const MetricsReport& report);

} // namespace tripatch
