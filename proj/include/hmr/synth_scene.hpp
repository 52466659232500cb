#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

#include "hmr/camera.hpp"
#include "hmr/image.hpp"

namespace hmr {

struct NotVisible : std::runtime_error {
    explicit NotVisible(const std::string& what) : std::runtime_error(what) {}
};

/// Recipe for a rendered tilted-plane RGB-D scene.
struct SceneSpec {
    double tilt_x_deg = 0.0;      // plane tilt about the camera x axis
    double tilt_y_deg = 0.0;      // plane tilt about the camera y axis
    double distance_m = 1.0;      // plane depth along the optical axis
    double noise_sigma_mm = 0.0;  // Gaussian depth noise
    double outlier_fraction = 0.0; // salt outliers, [0, 0.5)
    double contact_u = 0.0;
    double contact_v = 0.0;
    uint64_t seed = 0;
};

/// Rendered scene with exact (pre-noise) ground truth.
struct SyntheticScene {
    ImageRgb rgb;
    DepthMap depth;
    Eigen::Vector3d plane_normal_cam;   // unit, toward the camera
    Eigen::Vector3d plane_point_cam;    // a point on the plane, camera frame
    Eigen::Vector3d contact_point_cam;  // exact deprojection of the contact pixel
    double contact_u = 0.0;
    double contact_v = 0.0;
    CameraModel camera;
};

/// Ray-casts a tilted plane into a depth map (mm, 0 = invalid), optionally
/// corrupted by Gaussian noise and uniform salt outliers. Stored truths are
/// exact and pre-noise; deterministic given the seed. Throws NotVisible when
/// the contact pixel's ray misses the plane.
SyntheticScene synth_scene(const SceneSpec& spec, const CameraModel& camera);

} // namespace hmr
