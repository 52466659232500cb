#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmr {

struct ImageIoError : std::runtime_error {
    explicit ImageIoError(const std::string& what) : std::runtime_error(what) {}
};

/// Interleaved 8-bit RGB image.
struct ImageRgb {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels; // width*height*3

    ImageRgb() = default;
    ImageRgb(int w, int h, uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3, fill) {}

    uint8_t* at(int x, int y) { return pixels.data() + 3 * (static_cast<size_t>(y) * width + x); }
    const uint8_t* at(int x, int y) const {
        return pixels.data() + 3 * (static_cast<size_t>(y) * width + x);
    }
};

/// 16-bit depth map in millimeters; 0 marks an invalid (no-return) pixel.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<uint16_t> depth_mm; // row-major

    DepthMap() = default;
    DepthMap(int w, int h) : width(w), height(h), depth_mm(static_cast<size_t>(w) * h, 0) {}

    uint16_t& at(int x, int y) { return depth_mm[static_cast<size_t>(y) * width + x]; }
    uint16_t at(int x, int y) const { return depth_mm[static_cast<size_t>(y) * width + x]; }

    /// Depth in meters, 0.0 when invalid.
    double meters(int x, int y) const { return at(x, y) * 1e-3; }
};

/// Binary PGM (P5), maxval 65535, big-endian 16-bit samples.
void write_depth_pgm(const DepthMap& depth, const std::string& path);
DepthMap read_depth_pgm(const std::string& path);

/// Binary PPM (P6), maxval 255.
void write_rgb_ppm(const ImageRgb& image, const std::string& path);
ImageRgb read_rgb_ppm(const std::string& path);

} // namespace hmr
