#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmr/grounding_protocol.hpp" // PixelBox

namespace hmr {

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
    int line;
};
struct ValidationError : std::runtime_error {
    ValidationError(const std::string& what, int line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
    int line;
};

enum class Lighting { Natural, Dim, Bright };

std::string to_string(Lighting lighting);
Lighting lighting_from_string(const std::string& s);

struct Annotation {
    int acupoint_id = -1;
    std::string name;
    PixelBox box_px;
};

struct ManifestSample {
    std::string image_ref;
    int width = 0;
    int height = 0;
    std::optional<std::string> depth_ref;
    Lighting lighting = Lighting::Natural;
    std::string background;
    std::vector<Annotation> annotations;
};

struct ManifestSummary {
    size_t images = 0;
    size_t annotation_pairs = 0;
};

/// JSON Lines, one sample per line. Throws ParseError / ValidationError
/// carrying the offending line number.
std::vector<ManifestSample> load_manifest(const std::string& path);

void save_manifest(const std::vector<ManifestSample>& samples, const std::string& path);

ManifestSummary summarize(const std::vector<ManifestSample>& samples);

/// Invariant check used by the loader; line is for error reporting.
void validate_sample(const ManifestSample& sample, int line = 0);

} // namespace hmr
