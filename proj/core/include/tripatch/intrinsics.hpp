#pragma once

#include <string>

#include "tripatch/errors.hpp"

namespace tripatch {

/// Pinhole intrinsics in pixels. Normalized camera coordinates are
/// u = (x - cx)/fx, v = (y - cy)/fy for an image point (x, y).
struct Intrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0)) throw input_error("Intrinsics: fx and fy must be > 0");
    }

    double u(double x) const { return (x - cx) / fx; }
    double v(double y) const { return (y - cy) / fy; }
};

/// Reads {"fx":..., "fy":..., "cx":..., "cy":...} from a JSON file.
Intrinsics load_intrinsics(const std::string& path);
void save_intrinsics(const Intrinsics& K, const std::string& path);

} // namespace tripatch
