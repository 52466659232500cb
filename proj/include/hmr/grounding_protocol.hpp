#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmr/errors.hpp"

namespace hmr {

// Textual I/O contract of the high-level grounding module:
// <img>...</img> prompts in, <ref>NAME</ref><box>(x1,y1),(x2,y2)</box> streams out,
// with box coordinates normalized to integers in [0, 1000).

struct MalformedToken : std::runtime_error {
    explicit MalformedToken(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidBox : std::runtime_error {
    explicit InvalidBox(const std::string& what) : std::runtime_error(what) {}
};

struct NormalizedBox {
    int x1 = 0, y1 = 0, x2 = 0, y2 = 0; // thousandths of image extent

    bool valid() const {
        return 0 <= x1 && x1 <= x2 && x2 <= 999 && 0 <= y1 && y1 <= y2 && y2 <= 999;
    }
    bool operator==(const NormalizedBox&) const = default;
};

struct GroundingRecord {
    int acupoint_id = -1; // -1 = name not found in the registry
    std::string name;
    NormalizedBox box;

    bool operator==(const GroundingRecord&) const = default;
};

struct PromptSample {
    std::string image_ref;
    std::string instruction;
};

struct PixelBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

/// Resolves an acupoint name to its numeric id, or -1 when unknown.
using NameResolver = std::function<int(const std::string&)>;

std::string serialize_prompt(const PromptSample& sample);

/// Inverse of serialize_prompt. Throws MalformedToken on anything else.
PromptSample parse_prompt(const std::string& raw);

/// Extracts every <ref>..</ref><box>..</box> pair in order; surrounding prose is
/// ignored. Unknown names are kept with acupoint_id = -1 so the benchmark can
/// count them as failures. Throws MalformedToken / OutOfRange.
std::vector<GroundingRecord> parse_grounding_output(const std::string& raw,
                                                    const NameResolver& resolver = {});

/// Renders records back to the token stream accepted by parse_grounding_output.
std::string serialize_grounding_output(const std::vector<GroundingRecord>& records);

/// Pixel box -> [0,1000) integer box: c -> clamp(floor(c*1000/D), 0, 999).
NormalizedBox normalize_box(const PixelBox& px, int width, int height);

/// Normalized -> pixel coordinates with the cell-center convention
/// n -> (n + 0.5) * D / 1000, so normalize(denormalize(b)) == b for D >= 1000.
PixelBox denormalize_box(const NormalizedBox& box, int width, int height);

/// Midpoint of the denormalized rectangle, pixels.
std::pair<double, double> box_center(const NormalizedBox& box, int width, int height);

} // namespace hmr
