#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tripatch/canny.hpp"
#include "tripatch/errors.hpp"
#include "tripatch/polyline.hpp"

using namespace tripatch;

namespace {

/// Independent blur + central-difference gradient, used as the oracle for
/// edge localization (argmax of magnitude per row).
std::vector<double> oracle_magnitude(const Image2D& img, double sigma) {
    const Image2D gray = img.to_gray();
    const int w = gray.width, h = gray.height;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i)
        sum += kernel[i + radius] = std::exp(-i * i / (2.0 * sigma * sigma));
    for (double& k : kernel) k /= sum;
    auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(v, hi)); };
    std::vector<double> bx(gray.data.size()), blurred(gray.data.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * gray.at(clampi(x + i, 0, w - 1), y);
            bx[static_cast<std::size_t>(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * bx[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
            blurred[static_cast<std::size_t>(y) * w + x] = acc;
        }
    std::vector<double> mag(gray.data.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double gx = blurred[static_cast<std::size_t>(y) * w + clampi(x + 1, 0, w - 1)] -
                              blurred[static_cast<std::size_t>(y) * w + clampi(x - 1, 0, w - 1)];
            const double gy = blurred[static_cast<std::size_t>(clampi(y + 1, 0, h - 1)) * w + x] -
                              blurred[static_cast<std::size_t>(clampi(y - 1, 0, h - 1)) * w + x];
            mag[static_cast<std::size_t>(y) * w + x] = std::hypot(gx, gy);
        }
    return mag;
}

Image2D nested_rectangles(int w, int h) {
    Image2D img(w, h, 1, 0.1);
    auto fill = [&](int x0, int y0, int x1, int y1, double v) {
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) img.at(x, y) = v;
    };
    fill(8, 8, w - 9, h - 9, 0.55);
    fill(16, 16, w - 17, h - 17, 1.0);
    return img;
}

} // namespace

TEST_CASE("constant image has no edges") {
    const Image2D img(32, 24, 1, 0.37);
    const EdgeMap edges = canny(img, 1.4, 0.1, 0.25);
    CHECK(edges.edge_count() == 0);
}

TEST_CASE("threshold and sigma preconditions") {
    const Image2D img(8, 8, 1, 0.0);
    CHECK_THROWS_AS(canny(img, 1.0, 0.3, 0.1), input_error);
    CHECK_THROWS_AS(canny(img, 1.0, 0.2, 0.2), input_error);
    CHECK_THROWS_AS(canny(img, 0.0, 0.1, 0.3), input_error);
}

TEST_CASE("vertical step yields a single one-pixel line near the step") {
    const int W = 64, H = 32;
    Image2D img(W, H, 1, 0.0);
    for (int y = 0; y < H; ++y)
        for (int x = W / 2; x < W; ++x) img.at(x, y) = 1.0;
    const EdgeMap edges = canny(img, 1.0, 0.1, 0.3);
    const std::vector<double> mag = oracle_magnitude(img, 1.0);

    for (int y = 0; y < H; ++y) {
        int count = 0, col = -1;
        for (int x = 0; x < W; ++x)
            if (edges.at(x, y)) {
                ++count;
                col = x;
            }
        CHECK(count == 1);
        // oracle: argmax of the independent gradient magnitude in this row
        int best = 0;
        for (int x = 1; x < W; ++x)
            if (mag[static_cast<std::size_t>(y) * W + x] > mag[static_cast<std::size_t>(y) * W + best])
                best = x;
        CHECK(std::abs(col - best) <= 1);
    }
}

TEST_CASE("nested rectangles produce two closed contours near their perimeters") {
    const int W = 64, H = 56;
    const Image2D img = nested_rectangles(W, H);
    const EdgeMap edges = canny(img, 1.0, 0.1, 0.25);
    const std::vector<Polyline> chains = trace_polylines(edges);
    std::size_t closed = 0;
    for (const Polyline& p : chains) closed += p.closed ? 1 : 0;
    CHECK(chains.size() == 2);
    CHECK(closed == 2);

    // Edge pixels track the two rectangle boundaries; allow 10% slack for
    // corner rounding.
    const double outer = 2.0 * ((W - 16.0) + (H - 16.0));
    const double inner = 2.0 * ((W - 32.0) + (H - 32.0));
    const double expected = outer + inner;
    CHECK(edges.edge_count() > 0.9 * expected);
    CHECK(edges.edge_count() < 1.1 * expected);
}

TEST_CASE("edge pixels sit above the low threshold of the gradient magnitude") {
    const int W = 48, H = 40;
    Image2D img(W, H, 1, 0.2);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            if ((x - 20) * (x - 20) + (y - 20) * (y - 20) < 144) img.at(x, y) = 0.9;
    const double sigma = 1.2, low = 0.12, high = 0.3;
    const EdgeMap edges = canny(img, sigma, low, high);
    REQUIRE(edges.edge_count() > 0);
    const std::vector<double> mag = gradient_magnitude(img, sigma);
    const double low_level = low * *std::max_element(mag.begin(), mag.end());
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            if (edges.at(x, y))
                CHECK(mag[static_cast<std::size_t>(y) * W + x] >= low_level);
}

TEST_CASE("RGB input runs through the luma conversion") {
    Image2D img(32, 32, 3, 0.0);
    for (int y = 0; y < 32; ++y)
        for (int x = 16; x < 32; ++x) {
            img.at(x, y, 0) = 1.0;
            img.at(x, y, 1) = 0.5;
            img.at(x, y, 2) = 0.25;
        }
    const EdgeMap edges = canny(img, 1.0, 0.1, 0.3);
    CHECK(edges.edge_count() > 0);
}
