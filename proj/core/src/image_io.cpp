#include "tripatch/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "tripatch/errors.hpp"

namespace tripatch {

namespace {

bool has_suffix(const std::string& s, const char* suffix) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::size_t n = std::strlen(suffix);
    return lower.size() >= n && lower.compare(lower.size() - n, n, suffix) == 0;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// ---------------------------------------------------------------- PNM ----

int pnm_next_value(std::istream& in) {
    // Skips whitespace and '#' comments between header tokens.
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v = -1;
    in >> v;
    if (!in) throw input_error("PNM: malformed header");
    return v;
}

struct PnmData {
    int width = 0, height = 0, maxval = 0, channels = 0;
    std::vector<uint16_t> samples; // interleaved
};

PnmData read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P') throw input_error("PNM: bad magic in " + path);
    const char kind = magic[1];
    bool ascii;
    PnmData out;
    switch (kind) {
    case '2': ascii = true;  out.channels = 1; break;
    case '5': ascii = false; out.channels = 1; break;
    case '3': ascii = true;  out.channels = 3; break;
    case '6': ascii = false; out.channels = 3; break;
    default: throw input_error("PNM: unsupported format P" + std::string(1, kind));
    }
    out.width = pnm_next_value(in);
    out.height = pnm_next_value(in);
    out.maxval = pnm_next_value(in);
    if (out.width <= 0 || out.height <= 0)
        throw input_error("PNM: zero-dimension image in " + path);
    if (out.maxval <= 0 || out.maxval > 65535)
        throw input_error("PNM: unsupported maxval");
    const std::size_t count =
        static_cast<std::size_t>(out.width) * out.height * out.channels;
    out.samples.resize(count);
    if (ascii) {
        for (std::size_t i = 0; i < count; ++i) {
            int v = pnm_next_value(in);
            if (v < 0 || v > out.maxval) throw input_error("PNM: sample out of range");
            out.samples[i] = static_cast<uint16_t>(v);
        }
    } else {
        in.get(); // single whitespace after maxval
        if (out.maxval < 256) {
            std::vector<uint8_t> raw(count);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
            if (!in) throw input_error("PNM: truncated pixel data in " + path);
            for (std::size_t i = 0; i < count; ++i) out.samples[i] = raw[i];
        } else {
            std::vector<uint8_t> raw(count * 2);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
            if (!in) throw input_error("PNM: truncated pixel data in " + path);
            for (std::size_t i = 0; i < count; ++i) // big-endian per netpbm
                out.samples[i] = static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
        }
    }
    return out;
}

void write_pgm16(const std::string& path, int width, int height,
                 const std::vector<uint16_t>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write file: " + path);
    out << "P5\n" << width << " " << height << "\n65535\n";
    std::vector<uint8_t> raw(samples.size() * 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        raw[2 * i] = static_cast<uint8_t>(samples[i] >> 8);
        raw[2 * i + 1] = static_cast<uint8_t>(samples[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw input_error("write failed: " + path);
}

// ---------------------------------------------------------------- PNG ----

struct PngData {
    int width = 0, height = 0, channels = 0, bit_depth = 0;
    std::vector<uint16_t> samples;
};

PngData read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw input_error("cannot open file: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw input_error("unsupported format / decode failure: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw input_error("PNG: init failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw input_error("PNG: init failure");
    }
    std::vector<png_bytep> row_ptrs;
    std::vector<uint8_t> raw;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw input_error("unsupported format / decode failure: " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_uint_32 width = png_get_image_width(png, info);
    png_uint_32 height = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    int channels = png_get_channels(png, info);
    if (width == 0 || height == 0) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw input_error("PNG: zero-dimension image in " + path);
    }
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw input_error("PNG: unsupported channel count in " + path);
    }

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    raw.resize(rowbytes * height);
    row_ptrs.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) row_ptrs[y] = raw.data() + y * rowbytes;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    PngData out;
    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.channels = channels;
    out.bit_depth = bit_depth;
    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    out.samples.resize(count);
    if (bit_depth == 16) { // PNG stores 16-bit big-endian
        for (std::size_t i = 0; i < count; ++i)
            out.samples[i] = static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    } else {
        for (std::size_t i = 0; i < count; ++i) out.samples[i] = raw[i];
    }
    return out;
}

void write_png(const std::string& path, int width, int height, int channels, int bit_depth,
               const std::vector<uint16_t>& samples) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw input_error("cannot write file: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw input_error("PNG: init failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw input_error("PNG: init failure");
    }
    std::vector<uint8_t> raw;
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw input_error("PNG: write failure: " + path);
    }
    png_init_io(png, fp.get());
    const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    const std::size_t rowsamples = static_cast<std::size_t>(width) * channels;
    if (bit_depth == 16) {
        raw.resize(count * 2);
        for (std::size_t i = 0; i < count; ++i) {
            raw[2 * i] = static_cast<uint8_t>(samples[i] >> 8);
            raw[2 * i + 1] = static_cast<uint8_t>(samples[i] & 0xff);
        }
        row_ptrs.resize(height);
        for (int y = 0; y < height; ++y) row_ptrs[y] = raw.data() + 2 * rowsamples * y;
    } else {
        raw.resize(count);
        for (std::size_t i = 0; i < count; ++i) raw[i] = static_cast<uint8_t>(samples[i]);
        row_ptrs.resize(height);
        for (int y = 0; y < height; ++y) row_ptrs[y] = raw.data() + rowsamples * y;
    }
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

Image2D Image2D::to_gray() const {
    if (channels == 1) return *this;
    Image2D g(width, height, 1);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            g.at(x, y) = 0.299 * at(x, y, 0) + 0.587 * at(x, y, 1) + 0.114 * at(x, y, 2);
    return g;
}

Image2D load_image(const std::string& path) {
    int width, height, channels, maxval;
    std::vector<uint16_t> samples;
    if (has_suffix(path, ".png")) {
        PngData png = read_png(path);
        width = png.width;
        height = png.height;
        channels = png.channels;
        maxval = png.bit_depth == 16 ? 65535 : 255;
        samples = std::move(png.samples);
    } else if (has_suffix(path, ".pgm") || has_suffix(path, ".ppm") || has_suffix(path, ".pnm")) {
        PnmData pnm = read_pnm(path);
        width = pnm.width;
        height = pnm.height;
        channels = pnm.channels;
        maxval = pnm.maxval;
        samples = std::move(pnm.samples);
    } else {
        throw input_error("unsupported image format: " + path);
    }
    Image2D img(width, height, channels);
    const double scale = 1.0 / maxval;
    for (std::size_t i = 0; i < samples.size(); ++i) img.data[i] = samples[i] * scale;
    return img;
}

void save_image_png(const Image2D& img, const std::string& path) {
    std::vector<uint16_t> samples(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        double v = std::clamp(img.data[i], 0.0, 1.0);
        samples[i] = static_cast<uint16_t>(std::lround(v * 255.0));
    }
    write_png(path, img.width, img.height, img.channels, 8, samples);
}

DepthMap load_depth(const std::string& path, double depth_scale) {
    if (!(depth_scale > 0.0)) throw input_error("load_depth: depth_scale must be > 0");
    int width, height;
    std::vector<uint16_t> samples;
    if (has_suffix(path, ".png")) {
        PngData png = read_png(path);
        if (png.channels != 1 || png.bit_depth != 16)
            throw input_error("load_depth: expected 16-bit single-channel input: " + path);
        width = png.width;
        height = png.height;
        samples = std::move(png.samples);
    } else if (has_suffix(path, ".pgm")) {
        PnmData pnm = read_pnm(path);
        if (pnm.channels != 1 || pnm.maxval < 256)
            throw input_error("load_depth: expected 16-bit single-channel input: " + path);
        width = pnm.width;
        height = pnm.height;
        samples = std::move(pnm.samples);
    } else {
        throw input_error("load_depth: unsupported format: " + path);
    }
    DepthMap depth(width, height);
    for (std::size_t i = 0; i < samples.size(); ++i)
        depth.data[i] = samples[i] * depth_scale; // 0 stays invalid
    return depth;
}

void save_depth(const DepthMap& depth, const std::string& path, double depth_scale) {
    if (!(depth_scale > 0.0)) throw input_error("save_depth: depth_scale must be > 0");
    std::vector<uint16_t> samples(depth.data.size());
    for (std::size_t i = 0; i < depth.data.size(); ++i) {
        const double d = depth.data[i];
        if (d <= 0.0) {
            samples[i] = 0;
        } else {
            long u = std::lround(d / depth_scale);
            samples[i] = static_cast<uint16_t>(std::clamp(u, 1L, 65535L));
        }
    }
    if (has_suffix(path, ".pgm")) {
        write_pgm16(path, depth.width, depth.height, samples);
    } else {
        write_png(path, depth.width, depth.height, 1, 16, samples);
    }
}

NormalMap load_normals_png(const std::string& path) {
    const PngData png = read_png(path);
    if (png.channels != 3 || png.bit_depth != 8)
        throw input_error("load_normals_png: expected 8-bit RGB input: " + path);
    NormalMap normals(png.width, png.height);
    for (std::size_t i = 0; i < normals.data.size(); ++i) {
        const double b = png.samples[3 * i + 2];
        if (b >= 128.0) continue; // invalid pixel
        const Vec3 n{png.samples[3 * i] / 255.0 * 2.0 - 1.0,
                     png.samples[3 * i + 1] / 255.0 * 2.0 - 1.0, b / 255.0 * 2.0 - 1.0};
        const double len = norm(n);
        if (len == 0.0) continue;
        normals.data[i] = n / len;
    }
    return normals;
}

void save_normals_png(const NormalMap& normals, const std::string& path) {
    std::vector<uint16_t> samples(static_cast<std::size_t>(normals.width) * normals.height * 3);
    std::size_t i = 0;
    for (const Vec3& n : normals.data) {
        samples[i++] = static_cast<uint16_t>(std::lround(std::clamp((n.x + 1.0) / 2.0, 0.0, 1.0) * 255.0));
        samples[i++] = static_cast<uint16_t>(std::lround(std::clamp((n.y + 1.0) / 2.0, 0.0, 1.0) * 255.0));
        samples[i++] = static_cast<uint16_t>(std::lround(std::clamp((n.z + 1.0) / 2.0, 0.0, 1.0) * 255.0));
    }
    write_png(path, normals.width, normals.height, 3, 8, samples);
}

} // namespace tripatch
