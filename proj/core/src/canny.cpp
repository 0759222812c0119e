#include "tripatch/canny.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tripatch/errors.hpp"

namespace tripatch {

namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

std::vector<double> gaussian_blur(const std::vector<double>& src, int w, int h, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    std::vector<double> tmp(src.size()), out(src.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * src[static_cast<std::size_t>(y) * w + clampi(x + i, 0, w - 1)];
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    return out;
}

struct Gradients {
    std::vector<double> gx, gy, mag;
    double max_mag = 0.0;
};

Gradients sobel(const std::vector<double>& img, int w, int h) {
    Gradients g;
    g.gx.resize(img.size());
    g.gy.resize(img.size());
    g.mag.resize(img.size());
    auto px = [&](int x, int y) { return img[static_cast<std::size_t>(clampi(y, 0, h - 1)) * w + clampi(x, 0, w - 1)]; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            g.gx[i] = gx;
            g.gy[i] = gy;
            g.mag[i] = std::hypot(gx, gy);
            g.max_mag = std::max(g.max_mag, g.mag[i]);
        }
    return g;
}

} // namespace

std::vector<double> gradient_magnitude(const Image2D& img, double sigma) {
    const Image2D gray = img.to_gray();
    const std::vector<double> blurred = gaussian_blur(gray.data, gray.width, gray.height, sigma);
    return sobel(blurred, gray.width, gray.height).mag;
}

EdgeMap canny(const Image2D& img, double sigma, double low, double high) {
    if (!(sigma > 0.0)) throw input_error("canny: sigma must be > 0");
    if (!(low < high)) throw input_error("canny: low threshold must be < high threshold");

    const Image2D gray = img.to_gray();
    const int w = gray.width, h = gray.height;
    const std::vector<double> blurred = gaussian_blur(gray.data, w, h, sigma);
    const Gradients g = sobel(blurred, w, h);

    EdgeMap edges(w, h);
    if (g.max_mag == 0.0) return edges; // constant image

    const double low_level = low * g.max_mag;
    const double high_level = high * g.max_mag;

    // Non-maximum suppression along the rounded gradient direction.
    std::vector<uint8_t> thin(g.mag.size(), 0);
    auto mag_at = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return g.mag[static_cast<std::size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double m = g.mag[i];
            if (m < low_level) continue;
            const double angle = std::atan2(g.gy[i], g.gx[i]);
            const int dx = static_cast<int>(std::lround(std::cos(angle)));
            const int dy = static_cast<int>(std::lround(std::sin(angle)));
            const double ahead = mag_at(x + dx, y + dy);
            const double behind = mag_at(x - dx, y - dy);
            if (m > ahead && m >= behind) thin[i] = 1;
        }

    // Hysteresis: grow from strong pixels through weak ones (8-connected).
    std::vector<std::size_t> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (thin[i] && g.mag[i] >= high_level && !edges.data[i]) {
                edges.data[i] = 1;
                stack.push_back(i);
                while (!stack.empty()) {
                    const std::size_t j = stack.back();
                    stack.pop_back();
                    const int jx = static_cast<int>(j % w), jy = static_cast<int>(j / w);
                    for (int ny = jy - 1; ny <= jy + 1; ++ny)
                        for (int nx = jx - 1; nx <= jx + 1; ++nx) {
                            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                            const std::size_t k = static_cast<std::size_t>(ny) * w + nx;
                            if (thin[k] && !edges.data[k] && g.mag[k] >= low_level) {
                                edges.data[k] = 1;
                                stack.push_back(k);
                            }
                        }
                }
            }
        }
    return edges;
}

} // namespace tripatch
