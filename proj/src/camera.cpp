#include "hmr/camera.hpp"

#include <cmath>

namespace hmr {

void CameraModel::validate() const {
    if (fx <= 0 || fy <= 0) throw std::invalid_argument("focal lengths must be positive");
    if (width < 1 || height < 1) throw std::invalid_argument("image dimensions must be >= 1");
    if (cx <= 0 || cx >= width || cy <= 0 || cy >= height)
        throw std::invalid_argument("principal point must lie inside the image");
    if (orthonormality_error(extrinsic_rotation) > 1e-9)
        throw std::invalid_argument("extrinsic rotation is not in SO(3)");
}

Eigen::Vector3d deproject(double u, double v, double depth_m, const CameraModel& cam) {
    if (depth_m <= 0.0) throw InvalidDepth("depth must be positive (0 marks invalid pixels)");
    if (u < 0 || u >= cam.width || v < 0 || v >= cam.height)
        throw std::invalid_argument("pixel outside image");
    return {(u - cam.cx) * depth_m / cam.fx, (v - cam.cy) * depth_m / cam.fy, depth_m};
}

std::pair<double, double> project(const Eigen::Vector3d& p, const CameraModel& cam) {
    if (p.z() <= 0.0) throw BehindCamera("point has non-positive z in camera frame");
    return {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy};
}

Eigen::Vector3d camera_to_base(const Eigen::Vector3d& p, const CameraModel& cam) {
    return cam.extrinsic_rotation * p + cam.extrinsic_translation;
}

Eigen::Vector3d base_to_camera(const Eigen::Vector3d& p, const CameraModel& cam) {
    return cam.extrinsic_rotation.transpose() * (p - cam.extrinsic_translation);
}

PatchResult extract_patch(const DepthMap& depth, double center_u, double center_v, int radius_px,
                          const CameraModel& cam) {
    if (radius_px < 1) throw std::invalid_argument("patch radius must be >= 1");
    int u0 = static_cast<int>(std::floor(center_u));
    int v0 = static_cast<int>(std::floor(center_v));
    PatchResult result;
    size_t in_disc = 0;
    for (int dv = -radius_px; dv <= radius_px; ++dv) {
        for (int du = -radius_px; du <= radius_px; ++du) {
            if (du * du + dv * dv > radius_px * radius_px) continue;
            int u = u0 + du, v = v0 + dv;
            if (u < 0 || u >= depth.width || v < 0 || v >= depth.height) continue;
            ++in_disc;
            uint16_t d = depth.at(u, v);
            if (d == 0) continue;
            result.points.push_back(deproject(u, v, d * 1e-3, cam));
        }
    }
    if (result.points.size() < 3)
        throw TooFewPoints("patch has " + std::to_string(result.points.size()) +
                           " valid points, need >= 3");
    result.valid_fraction = in_disc ? double(result.points.size()) / double(in_disc) : 0.0;
    return result;
}

} // namespace hmr
