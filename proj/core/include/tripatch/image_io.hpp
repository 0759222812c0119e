#pragma once

#include <string>

#include "tripatch/depth_map.hpp"
#include "tripatch/image.hpp"

namespace tripatch {

/// Loads an 8-bit PNG (gray or RGB) or PGM/PPM image, scaling samples to
/// [0,1] (8-bit channels divided by 255, 16-bit by 65535).
Image2D load_image(const std::string& path);

/// Writes an 8-bit PNG (gray for 1 channel, RGB for 3). Values are clamped
/// to [0,1] and quantized by round(v * 255).
void save_image_png(const Image2D& img, const std::string& path);

/// Loads a 16-bit single-channel PNG or PGM as depth: stored integer u maps
/// to u * depth_scale meters, u = 0 stays invalid. Rejects non-16-bit input.
DepthMap load_depth(const std::string& path, double depth_scale);

/// Writes depth as 16-bit gray (PNG or PGM by extension). Each value is
/// round(d / depth_scale) clamped to [0, 65535]; invalid pixels store 0.
void save_depth(const DepthMap& depth, const std::string& path, double depth_scale);

/// Writes normals as 8-bit RGB with each component mapped by (n + 1) / 2;
/// invalid pixels come out mid-gray from the zero vector.
void save_normals_png(const NormalMap& normals, const std::string& path);

/// Reads the encoding above back. Valid normals always store blue <= 127
/// (z < 0 strictly), so blue >= 128 marks a pixel invalid; decoded vectors
/// are renormalized to unit length.
NormalMap load_normals_png(const std::string& path);

} // namespace tripatch
