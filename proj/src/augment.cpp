#include "hmr/augment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hmr {
namespace {

constexpr double kPi = 3.14159265358979323846;

double snap(double v) { return std::abs(v) < 1e-12 ? 0.0 : (std::abs(v - 1.0) < 1e-12 ? 1.0 : (std::abs(v + 1.0) < 1e-12 ? -1.0 : v)); }

struct Rot2 {
    double c, s;     // forward mapping [(c, s), (-s, c)] about the center
    double cx, cy;   // source center
    double ox, oy;   // destination center
    int out_w, out_h;

    std::pair<double, double> fwd(double x, double y) const {
        double dx = x - cx, dy = y - cy;
        return {c * dx + s * dy + ox, -s * dx + c * dy + oy};
    }
    std::pair<double, double> inv(double x, double y) const {
        double dx = x - ox, dy = y - oy;
        return {c * dx - s * dy + cx, s * dx + c * dy + cy};
    }
};

Rot2 make_rotation(double theta_deg, int w, int h) {
    double t = theta_deg * kPi / 180.0;
    Rot2 r;
    r.c = snap(std::cos(t));
    r.s = snap(std::sin(t));
    r.cx = 0.5 * w;
    r.cy = 0.5 * h;
    double out_wf = std::abs(r.c) * w + std::abs(r.s) * h;
    double out_hf = std::abs(r.s) * w + std::abs(r.c) * h;
    r.out_w = std::max(1, static_cast<int>(std::lround(out_wf)));
    r.out_h = std::max(1, static_cast<int>(std::lround(out_hf)));
    r.ox = 0.5 * r.out_w;
    r.oy = 0.5 * r.out_h;
    return r;
}

/// AABB of the four transformed corners, clipped to the canvas. Returns false
/// when the clipped box is empty.
bool remap_box(const PixelBox& in, const Rot2& rot, PixelBox& out) {
    double xs[4], ys[4];
    const double corners[4][2] = {
        {in.x1, in.y1}, {in.x2, in.y1}, {in.x2, in.y2}, {in.x1, in.y2}};
    for (int i = 0; i < 4; ++i) {
        auto [x, y] = rot.fwd(corners[i][0], corners[i][1]);
        xs[i] = x;
        ys[i] = y;
    }
    out.x1 = std::clamp(*std::min_element(xs, xs + 4), 0.0, double(rot.out_w));
    out.x2 = std::clamp(*std::max_element(xs, xs + 4), 0.0, double(rot.out_w));
    out.y1 = std::clamp(*std::min_element(ys, ys + 4), 0.0, double(rot.out_h));
    out.y2 = std::clamp(*std::max_element(ys, ys + 4), 0.0, double(rot.out_h));
    return out.x2 > out.x1 && out.y2 > out.y1;
}

AugmentedSample apply_rotation(const ManifestSample& sample, const ImageRgb& image,
                               double theta_deg) {
    if (theta_deg <= -180.0 || theta_deg > 180.0)
        throw std::invalid_argument("rotation angle must be in (-180, 180] degrees");
    Rot2 rot = make_rotation(theta_deg, sample.width, sample.height);

    AugmentedSample result;
    result.sample = sample;
    result.sample.width = rot.out_w;
    result.sample.height = rot.out_h;
    result.sample.annotations.clear();
    for (const auto& ann : sample.annotations) {
        PixelBox mapped;
        if (remap_box(ann.box_px, rot, mapped)) {
            Annotation a = ann;
            a.box_px = mapped;
            result.sample.annotations.push_back(std::move(a));
        }
    }
    if (!sample.annotations.empty() && result.sample.annotations.empty())
        throw DegenerateResult("rotation dropped every annotation");

    // Nearest-neighbor inverse mapping; pixels falling outside the source stay black.
    result.image = ImageRgb(rot.out_w, rot.out_h);
    if (image.width == sample.width && image.height == sample.height) {
        for (int y = 0; y < rot.out_h; ++y) {
            for (int x = 0; x < rot.out_w; ++x) {
                auto [sx, sy] = rot.inv(x + 0.5, y + 0.5);
                int ix = static_cast<int>(std::floor(sx));
                int iy = static_cast<int>(std::floor(sy));
                if (ix >= 0 && ix < image.width && iy >= 0 && iy < image.height) {
                    const uint8_t* src = image.at(ix, iy);
                    uint8_t* dst = result.image.at(x, y);
                    dst[0] = src[0];
                    dst[1] = src[1];
                    dst[2] = src[2];
                }
            }
        }
    }
    return result;
}

AugmentedSample apply_crop(const ManifestSample& sample, const ImageRgb& image,
                           const CropOp& crop) {
    if (crop.x1 < 0 || crop.y1 < 0 || crop.x2 > sample.width || crop.y2 > sample.height ||
        crop.x2 - crop.x1 < 1 || crop.y2 - crop.y1 < 1)
        throw std::invalid_argument("crop rectangle must lie inside the image");

    int out_w = static_cast<int>(std::lround(crop.x2 - crop.x1));
    int out_h = static_cast<int>(std::lround(crop.y2 - crop.y1));

    AugmentedSample result;
    result.sample = sample;
    result.sample.width = out_w;
    result.sample.height = out_h;
    result.sample.annotations.clear();
    for (const auto& ann : sample.annotations) {
        PixelBox b{ann.box_px.x1 - crop.x1, ann.box_px.y1 - crop.y1, ann.box_px.x2 - crop.x1,
                   ann.box_px.y2 - crop.y1};
        b.x1 = std::clamp(b.x1, 0.0, double(out_w));
        b.x2 = std::clamp(b.x2, 0.0, double(out_w));
        b.y1 = std::clamp(b.y1, 0.0, double(out_h));
        b.y2 = std::clamp(b.y2, 0.0, double(out_h));
        if (b.x2 > b.x1 && b.y2 > b.y1) {
            Annotation a = ann;
            a.box_px = b;
            result.sample.annotations.push_back(std::move(a));
        }
    }
    if (!sample.annotations.empty() && result.sample.annotations.empty())
        throw DegenerateResult("crop dropped every annotation");

    result.image = ImageRgb(out_w, out_h);
    if (image.width == sample.width && image.height == sample.height) {
        int x0 = static_cast<int>(std::lround(crop.x1));
        int y0 = static_cast<int>(std::lround(crop.y1));
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                int sx = x0 + x, sy = y0 + y;
                if (sx >= 0 && sx < image.width && sy >= 0 && sy < image.height) {
                    const uint8_t* src = image.at(sx, sy);
                    uint8_t* dst = result.image.at(x, y);
                    dst[0] = src[0];
                    dst[1] = src[1];
                    dst[2] = src[2];
                }
            }
        }
    }
    return result;
}

} // namespace

AugmentedSample augment_sample(const ManifestSample& sample, const ImageRgb& image,
                               const AugmentOp& op) {
    if (const auto* rot = std::get_if<RotateOp>(&op))
        return apply_rotation(sample, image, rot->theta_deg);
    return apply_crop(sample, image, std::get<CropOp>(op));
}

AugmentOp random_augment_op(const ManifestSample& sample, uint64_t seed) {
    std::mt19937_64 rng(seed);
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
        std::uniform_real_distribution<double> angle(-30.0, 30.0);
        return RotateOp{angle(rng)};
    }
    // Crop to a random 60-90% window.
    std::uniform_real_distribution<double> frac(0.6, 0.9);
    double fw = frac(rng), fh = frac(rng);
    double w = std::max(1.0, fw * sample.width);
    double h = std::max(1.0, fh * sample.height);
    std::uniform_real_distribution<double> ox(0.0, sample.width - w);
    std::uniform_real_distribution<double> oy(0.0, sample.height - h);
    double x1 = ox(rng), y1 = oy(rng);
    return CropOp{x1, y1, x1 + w, y1 + h};
}

} // namespace hmr
