#pragma once

#include <vector>

#include "tripatch/image.hpp"

namespace tripatch {

/// Binary edge mask with the same dimensions as the source image.
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    EdgeMap() = default;
    EdgeMap(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (uint8_t v : data) n += v;
        return n;
    }
};

/// Canny edge detection: Gaussian blur (sigma), Sobel gradients, 4-direction
/// non-maximum suppression, then double-threshold hysteresis. `low` and
/// `high` are fractions of the maximum gradient magnitude in the image.
/// RGB input is converted to grayscale (luma 0.299/0.587/0.114) first.
///
/// The NMS tie rule keeps a pixel when its magnitude strictly exceeds the
/// neighbor ahead along the gradient and is >= the neighbor behind, so a
/// two-pixel plateau at an ideal step yields a single one-pixel line.
EdgeMap canny(const Image2D& img, double sigma, double low, double high);

/// Gradient magnitude map used by canny (blur + Sobel), exposed so tests can
/// check edge pixels against the threshold levels.
std::vector<double> gradient_magnitude(const Image2D& img, double sigma);

} // namespace tripatch
