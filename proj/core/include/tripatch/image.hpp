#pragma once

#include <cstddef>
#include <vector>

#include "tripatch/errors.hpp"

namespace tripatch {

/// Row-major raster of intensities in [0,1], 1 (gray) or 3 (RGB) channels.
struct Image2D {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data; // width*height*channels, interleaved

    Image2D() = default;
    Image2D(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {
        if (w <= 0 || h <= 0 || (c != 1 && c != 3))
            throw input_error("Image2D: bad dimensions");
    }

    double& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    /// Rec.601 luma; identity on single-channel images.
    Image2D to_gray() const;
};

} // namespace tripatch
