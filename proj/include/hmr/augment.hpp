#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>

#include "hmr/image.hpp"
#include "hmr/manifest.hpp"

namespace hmr {

struct DegenerateResult : std::runtime_error {
    explicit DegenerateResult(const std::string& what) : std::runtime_error(what) {}
};

/// Rotation about the image center, degrees in (-180, 180]. The output canvas
/// is the tight bounding rectangle of the rotated image.
struct RotateOp {
    double theta_deg = 0.0;
};

/// Axis-aligned crop; the rectangle must lie inside the image.
struct CropOp {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

using AugmentOp = std::variant<RotateOp, CropOp>;

struct AugmentedSample {
    ManifestSample sample;
    ImageRgb image;
};

/// Applies the geometric transform to both image and annotations. Boxes are
/// remapped as the axis-aligned hull of their transformed corners and clipped
/// to the new canvas; boxes entirely outside a crop are dropped. Throws
/// DegenerateResult when every annotation is dropped.
AugmentedSample augment_sample(const ManifestSample& sample, const ImageRgb& image,
                               const AugmentOp& op);

/// Draws a random rotation or crop from the rng; deterministic given the seed.
AugmentOp random_augment_op(const ManifestSample& sample, uint64_t seed);

} // namespace hmr
