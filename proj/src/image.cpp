#include "hmr/image.hpp"

#include <fstream>

namespace hmr {
namespace {

void read_header(std::istream& in, const char* magic, int& w, int& h, int& maxval,
                 const std::string& path) {
    std::string m;
    in >> m;
    if (m != magic) throw ImageIoError(path + ": expected " + magic + " header, got " + m);
    // Skip comments between header fields.
    auto next_int = [&](int& out) {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string line;
            std::getline(in, line);
            in >> std::ws;
        }
        if (!(in >> out)) throw ImageIoError(path + ": truncated header");
    };
    next_int(w);
    next_int(h);
    next_int(maxval);
    in.get(); // single whitespace before raster
    if (w < 1 || h < 1) throw ImageIoError(path + ": bad dimensions");
}

} // namespace

void write_depth_pgm(const DepthMap& depth, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot write " + path);
    out << "P5\n" << depth.width << " " << depth.height << "\n65535\n";
    std::vector<uint8_t> raster(depth.depth_mm.size() * 2);
    for (size_t i = 0; i < depth.depth_mm.size(); ++i) {
        raster[2 * i] = static_cast<uint8_t>(depth.depth_mm[i] >> 8);
        raster[2 * i + 1] = static_cast<uint8_t>(depth.depth_mm[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raster.data()),
              static_cast<std::streamsize>(raster.size()));
    if (!out) throw ImageIoError("write failed: " + path);
}

DepthMap read_depth_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open " + path);
    int w, h, maxval;
    read_header(in, "P5", w, h, maxval, path);
    if (maxval != 65535) throw ImageIoError(path + ": expected 16-bit PGM (maxval 65535)");
    DepthMap depth(w, h);
    std::vector<uint8_t> raster(depth.depth_mm.size() * 2);
    in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.size()))
        throw ImageIoError(path + ": truncated raster");
    for (size_t i = 0; i < depth.depth_mm.size(); ++i)
        depth.depth_mm[i] = static_cast<uint16_t>((raster[2 * i] << 8) | raster[2 * i + 1]);
    return depth;
}

void write_rgb_ppm(const ImageRgb& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot write " + path);
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw ImageIoError("write failed: " + path);
}

ImageRgb read_rgb_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open " + path);
    int w, h, maxval;
    read_header(in, "P6", w, h, maxval, path);
    if (maxval != 255) throw ImageIoError(path + ": expected 8-bit PPM (maxval 255)");
    ImageRgb image(w, h);
    in.read(reinterpret_cast<char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(image.pixels.size()))
        throw ImageIoError(path + ": truncated raster");
    return image;
}

} // namespace hmr
