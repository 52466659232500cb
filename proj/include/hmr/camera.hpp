#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmr/geometry.hpp"
#include "hmr/image.hpp"

namespace hmr {

struct InvalidDepth : std::runtime_error {
    explicit InvalidDepth(const std::string& what) : std::runtime_error(what) {}
};
struct BehindCamera : std::runtime_error {
    explicit BehindCamera(const std::string& what) : std::runtime_error(what) {}
};
struct TooFewPoints : std::runtime_error {
    explicit TooFewPoints(const std::string& what) : std::runtime_error(what) {}
};

/// Pinhole intrinsics plus camera-to-base extrinsic pose.
struct CameraModel {
    double fx = 0, fy = 0, cx = 0, cy = 0;
    int width = 0, height = 0;
    Eigen::Matrix3d extrinsic_rotation{Eigen::Matrix3d::Identity()};
    Eigen::Vector3d extrinsic_translation{Eigen::Vector3d::Zero()};

    /// Throws std::invalid_argument on violated invariants.
    void validate() const;
};

/// Pixel + depth -> 3D point in the camera frame.
Eigen::Vector3d deproject(double u, double v, double depth_m, const CameraModel& cam);

/// Camera-frame point -> pixel. Throws BehindCamera for z <= 0.
std::pair<double, double> project(const Eigen::Vector3d& point, const CameraModel& cam);

/// Camera frame -> robot base frame via the extrinsic pose.
Eigen::Vector3d camera_to_base(const Eigen::Vector3d& point, const CameraModel& cam);
Eigen::Vector3d base_to_camera(const Eigen::Vector3d& point, const CameraModel& cam);

struct PatchResult {
    std::vector<Eigen::Vector3d> points; // camera frame
    double valid_fraction = 0.0;         // valid pixels / pixels in the disc
};

/// Deprojects every valid-depth pixel within `radius_px` of the center;
/// zero-depth pixels are skipped. Throws TooFewPoints when fewer than 3 remain.
PatchResult extract_patch(const DepthMap& depth, double center_u, double center_v, int radius_px,
                          const CameraModel& cam);

} // namespace hmr
